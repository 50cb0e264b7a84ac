// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/transforms.hpp"

#include <Eigen/Dense>

namespace afdm {

struct CrbConfig {
    DaftParams daft;
    int n_u = 0;
    double sigma_c2 = 1.0;
    double snr = 1.0;  // |a|^2 / sigma_w^2, linear
    double f_tau = 0.0;
    double f_nu = 0.0;

    void validate() const;
};

struct CrbPair {
    double f_tau = 0.0;
    double f_nu = 0.0;
};

struct FimResult {
    Eigen::Matrix2d analytic;
    Eigen::Matrix2d finite_difference;
    double max_rel_gap = 0.0;
};

// Both routes of the Fisher information for psi = [F_tau, F_nu] of a single path:
// closed-form kernel derivatives and central differences (step 1e-6) of the channel matrix.
FimResult fim_dual(const CrbConfig& cfg);

// Analytic route, after checking agreement with the finite-difference route (1e-6 relative)
// and positive semi-definiteness. Throws NumericalError otherwise.
Eigen::Matrix2d fim_numeric(const CrbConfig& cfg);

CrbPair crb_from_fim(const Eigen::Matrix2d& fim);

// Closed-form approximations; rejects lambda1 outside [0, crb_validity_bound].
CrbPair crb_closed_afdm(const CrbConfig& cfg);
// Limit lambda1 = 0 as derived separately for OFDM.
CrbPair crb_closed_ofdm(const CrbConfig& cfg);

double crb_validity_bound(int n, int n_u);

}  // namespace afdm
