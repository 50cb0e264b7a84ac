// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/receiver.hpp"
#include "afdm/random.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace afdm {

enum class ImpairmentKind { None, PhaseNoise, Cfo, Jitter };

struct ImpairmentSpec {
    ImpairmentKind kind = ImpairmentKind::None;
    // PhaseNoise: sigma_phi (rad). Cfo: sigma in ppm of the carrier. Jitter: sigma_sj.
    double sigma = 0.0;
};

struct ImpairmentDraw {
    PnCfoParams pn_cfo;
    SjParams sj;
};

// Offset term with std sigma (rad, ppm * f_c Hz, or sigma * T_s), slope term with std sigma / T_frame
// for phase noise and sigma for the (dimensionless) sampling skew. T_frame = (N + N_cpp) T_s.
ImpairmentDraw draw_impairments(const ImpairmentSpec& spec, const WaveformConfig& waveform,
                                double carrier_hz, Rng& rng);

enum class ChannelModel { ContinuousTime, DiscreteTime };

struct MonteCarloSpec {
    WaveformConfig waveform;
    ActiveSet active;
    TdlProfile profile;
    double v_kmh = 0.0;
    double carrier_hz = 5.8e9;
    ImpairmentSpec impairment;
    ChannelModel model = ChannelModel::ContinuousTime;
    int m_c = 4;
    long bits_per_trial = 0;  // empirical bits per (trial, SNR); 0 disables counting
    // Optional fixed channel (e.g. identity); when empty a realization is drawn per trial.
    std::function<DsChannel(std::uint64_t)> channel_factory;
};

struct BerPoint {
    double snr_db = 0.0;
    double ber_theory_mean = 0.0;
    double ber_empirical_mean = 0.0;  // NaN when counting is disabled
    double ci_low = 0.0;
    double ci_high = 0.0;
    int trials = 0;
    long bits = 0;
    long errors = 0;
};

// Effective channel of one trial under the spec's model and impairment draw.
EffectiveChannel trial_channel(const MonteCarloSpec& spec, const DsChannel& channel, const ImpairmentDraw& draw);

// Deterministic given seed; trials run on `threads` workers and are reduced in trial order.
std::vector<BerPoint> monte_carlo_ber(const MonteCarloSpec& spec, const std::vector<double>& snr_db,
                                      int n_trials, std::uint64_t seed, int threads = 1);

// 95% Wilson score interval.
void wilson_interval(long errors, long trials, double& lo, double& hi);

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace afdm
