// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/pulse.hpp"
#include "afdm/transforms.hpp"

#include <vector>

namespace afdm {

struct WaveformConfig {
    DaftParams daft;
    double delta_f = 15e3;
    double t_s = 0.0;
    int n_cpp = 0;
    int oversample = 10;
    PulseShape pulse;

    // Derives t_s = 1/(N delta_f) and validates.
    static WaveformConfig make(DaftParams daft, double delta_f, int n_cpp, int oversample,
                               PulseShape pulse);
    void validate() const;

    int n() const { return daft.n; }
    double period() const { return daft.n * t_s; }
    double lambda1_bar() const { return daft.lambda1 / (t_s * t_s); }
    double sample_step() const { return t_s / oversample; }
    int frame_samples() const { return (daft.n + n_cpp) * oversample; }
    double frame_start() const { return -n_cpp * t_s; }
    // Same configuration with lambda1 = lambda2 = 0.
    WaveformConfig as_ofdm() const;
};

struct ActiveSet {
    std::vector<int> indices;  // signed subcarriers in [-N/2, N/2), ascending
    int n_u = 0;

    bool contains_signed(long m) const;
    // Mask over the unsigned DAFT index q in [0, N).
    std::vector<bool> mask(int n) const;
    // Unsigned DAFT indices of the active carriers, ascending.
    std::vector<int> unsigned_indices(int n) const;
};

inline constexpr double kDefaultActiveTolerance = 0.4;

// RRC: the 2*floor(N(1-alpha)/2)+1 centered carriers (tolerance ignored).
// Other pulses: magnitude floor |P(m df)| >= eps*max|P| plus alias suppression
// |P((m+kN) df)| < (1-eps)*eps*max|P| for |k| in {1,2}.
ActiveSet active_subcarriers(const PulseShape& pulse, int n, double tolerance, double t_s);
ActiveSet default_active_set(const WaveformConfig& config);
ActiveSet full_active_set(int n);

// Throws ConfigError when c has a nonzero entry on a suppressed carrier.
void check_suppressed(const CVector& c, const ActiveSet& active, int n);

// Chirp-periodic continuous-time signal s(t) on an arbitrary uniform grid.
SampledSignal synthesize_window(const WaveformConfig& config, const ActiveSet& active,
                                const CVector& c, double t0, Eigen::Index count, double dt);

// Frame on t = -N_cpp T_s + i T_s/N_c, i in [0, (N+N_cpp) N_c).
SampledSignal synthesize_td(const WaveformConfig& config, const ActiveSet& active, const CVector& c);
SampledSignal synthesize_td(const WaveformConfig& config, const CVector& c);

// Direct evaluation of the chirped multicarrier form on the same grid as synthesize_td.
SampledSignal synthesize_fd(const WaveformConfig& config, const ActiveSet& active, const CVector& c);
SampledSignal synthesize_fd(const WaveformConfig& config, const CVector& c);

// Coefficient of the chirped subcarrier m in the multicarrier form:
// symbol_extend(c, m) * exp(j2pi lambda2 m^2) * P(m df) / (sqrt(N) T_s).
Complex subcarrier_coefficient(const WaveformConfig& config, const CVector& c, long m);

}  // namespace afdm
