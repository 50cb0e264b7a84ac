// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace afdm {

struct ChannelPath {
    Complex gain{1.0, 0.0};
    double delay = 0.0;    // s
    double doppler = 0.0;  // Hz
};

class DsChannel {
public:
    // Sorts paths by delay; rejects negative delays, non-finite values and empty lists.
    explicit DsChannel(std::vector<ChannelPath> paths);

    const std::vector<ChannelPath>& paths() const { return paths_; }
    size_t size() const { return paths_.size(); }
    double max_delay() const { return paths_.back().delay; }
    double total_power() const;

private:
    std::vector<ChannelPath> paths_;
};

struct NormalizedPath {
    Complex gain;   // gain referred to the first sampling instant
    double f_tau;   // (tau_max - tau_l) / (N T_s)
    double f_nu;    // nu_l / delta_f
};

struct PnCfoParams {
    double phi0 = 0.0;  // rad
    double phi1 = 0.0;  // rad/s
    double cfo = 0.0;   // Hz
};

struct SjParams {
    double delta0 = 0.0;  // s
    double delta1 = 0.0;  // dimensionless skew
    void validate() const;
};

enum class ChannelVariant { Ideal, PnCfo, Sj, DtReference };

// Rows are DAFT-domain outputs, columns are transmitted symbols (unsigned index q in [0,N)).
struct EffectiveChannel {
    CMatrix h;
    ChannelVariant variant = ChannelVariant::Ideal;
    std::vector<int> inputs;   // columns carrying symbols
    std::vector<int> outputs;  // rows used for detection

    CMatrix submatrix() const;
};

// (1/X) sum_{x<X} exp(-j2pi theta x)
Complex dirichlet_kernel(int order, double theta);

std::vector<NormalizedPath> normalize_paths(const DsChannel& channel, const WaveformConfig& config);

// One term of the effective channel:
// H(p,q) += gain * exp(j2pi lambda2 (q^2-p^2)) * exp(j2pi sgn(q) f_tau) * G_N((p-q)/N - theta).
struct KernelPath {
    Complex gain;
    double f_tau;
    double theta;
};

EffectiveChannel build_effective_channel(const std::vector<KernelPath>& paths,
                                         const WaveformConfig& config, const ActiveSet& active,
                                         ChannelVariant variant);

EffectiveChannel effective_channel_ideal(const DsChannel& channel, const WaveformConfig& config,
                                         const ActiveSet& active);
EffectiveChannel effective_channel_pn_cfo(const DsChannel& channel, const WaveformConfig& config,
                                          const ActiveSet& active, const PnCfoParams& imp);
EffectiveChannel effective_channel_sj(const DsChannel& channel, const WaveformConfig& config,
                                      const ActiveSet& active, const SjParams& imp);

// Sample-spaced model: delays rounded to whole samples, no pulse shaping, all N carriers.
// Inputs are restricted to `active` so that detection compares like with like.
EffectiveChannel dt_reference_channel(const DsChannel& channel, const WaveformConfig& config,
                                      const ActiveSet& active);
EffectiveChannel dt_reference_channel(const DsChannel& channel, const WaveformConfig& config);

// Response to a unit symbol on subcarrier 0, returned in centered order:
// element i corresponds to subcarrier i - N/2, so the identity gives a spike at N/2.
CVector impulse_response(const EffectiveChannel& h_eff);

struct TdlProfile {
    int n_paths = 3;
    double delay_spread = 0.5e-6;  // s
    double pdp_decay_db = 10.0;    // mean power drop across the delay spread
};

double max_doppler_hz(double v_kmh, double f_c);

DsChannel sample_realization(std::uint64_t seed, const TdlProfile& profile, double v_kmh, double f_c);

std::string channel_to_csv(const DsChannel& channel);
DsChannel channel_from_csv(const std::string& text);

}  // namespace afdm
