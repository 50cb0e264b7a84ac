// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/common.hpp"

namespace afdm {

struct DaftParams {
    int n = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    DaftParams() = default;
    DaftParams(int n_, double l1, double l2);

    // Throws ConfigError when N is odd/non-positive or a chirp parameter is not finite.
    void validate() const;
    bool is_ofdm() const { return lambda1 == 0.0 && lambda2 == 0.0; }
};

// Canonical lambda1 = A/(2N).
double canonical_lambda1(int n, int a = 1);

struct ChirpFrame {
    CVector samples;
    DaftParams params;

    ChirpFrame(CVector s, DaftParams p);
};

CMatrix build_daft_matrix(const DaftParams& params);

// y = A r (fast path: chirp, FFT, chirp).
CVector daft(const CVector& r, const DaftParams& params);
// x = A^H c.
CVector idaft(const ChirpFrame& c);
CVector idaft(const CVector& c, const DaftParams& params);

// Chirp-periodic extension of x to any integer index k.
Complex chirp_extend(const CVector& x, const DaftParams& params, long k);
// Extension of the symbol vector c to any integer index m.
Complex symbol_extend(const CVector& c, const DaftParams& params, long m);

// (1/T) * trapezoid over [0,T] of s(t) exp(-j2pi(lambda1_bar t^2 + m t / T)).
// The grid must contain t = 0 and t = T (to within 1e-9 of a sample step).
Complex afs_coefficient_numeric(const SampledSignal& signal, long m, double chirp_rate,
                                double period);

// Trapezoid over the whole sampled support of s(t) exp(-j2pi(lambda1_bar t^2 + f t)).
Complex aft_numeric(const SampledSignal& signal, double chirp_rate, double f);

}  // namespace afdm
