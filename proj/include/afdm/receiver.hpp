// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/channel.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace afdm {

struct RxConfig {
    WaveformConfig waveform;
    double rx_bandwidth = 0.0;  // B_rx, Hz
    double noise_var = 0.0;     // sigma_w^2
    int chirp_index = 1;        // A

    // Uses sweep_bandwidth() so that every chirped line stays inside the brickwall.
    static RxConfig make(const WaveformConfig& waveform, double noise_var);
    // ceil(2N(1+alpha)) * delta_f
    static double nominal_bandwidth(const WaveformConfig& waveform);
    // Two-sided width covering 2 lambda1_bar t + f over the frame plus one bin of Doppler.
    static double sweep_bandwidth(const WaveformConfig& waveform);
    void validate() const;
};

struct DetectionReport {
    RVector sinr;
    double ber_theory = 0.0;
    CVector symbol_estimates;
};

// Impairments applied inside the continuous-time receive chain, all referred to the
// first sampling instant t = tau_max.
struct PipelineImpairments {
    PnCfoParams pn_cfo;
    SjParams sj;
};

// Continuous-time receive chain: per-path delay (linear phase per Fourier line of the frame),
// Doppler, gain, chirp-matched brickwall filter, sampling at tau_max + n T_s, DAFT.
CVector ct_pipeline(const SampledSignal& frame, const DsChannel& channel, const RxConfig& rx,
                    const PipelineImpairments& imp = {}, std::optional<std::uint64_t> noise_seed = {});

// AFT of the pulse: integral of p(s) exp(-j2pi(lambda1_bar s^2 + f s)) ds.
Complex pulse_aft(const PulseShape& pulse, double t_s, double chirp_rate, double f);

// Response of the filter p*(-t) to exp(j2pi(lambda1_bar t^2 + m t / T)).
Complex chirp_filter_response(const PulseShape& pulse, const WaveformConfig& config, long m, double t);

// LMMSE on the detection submatrix: (H^H H + s2 I)^{-1} H^H; s2 = 0 gives the pseudo-inverse.
CMatrix lmmse_matrix(const CMatrix& h, double noise_var);
CMatrix lmmse_matrix(const EffectiveChannel& h, double noise_var);

RVector sinr_per_symbol(const CMatrix& h, double noise_var);
RVector sinr_per_symbol(const EffectiveChannel& h, double noise_var);

// Average BER over the entries of sinr (active carriers) for square M-QAM with Gray mapping.
double theoretical_ber(const RVector& sinr, int m_c);

double q_function(double x);

// Gray-coded square QAM with unit average energy. Bits are 0/1 bytes, MSB first per axis.
class QamMapper {
public:
    explicit QamMapper(int m_c);
    int bits_per_symbol() const { return bits_; }
    int order() const { return m_; }
    CVector map(const std::vector<std::uint8_t>& bits) const;
    std::vector<std::uint8_t> demap(const CVector& symbols) const;
    Complex point(int index) const;

private:
    int m_;
    int bits_;
    int side_;
    double scale_;
    double level(int gray_bits) const;
    int slice(double v) const;
};

std::vector<std::uint8_t> qam_demap(const CVector& symbols, int m_c);
CVector qam_map(const std::vector<std::uint8_t>& bits, int m_c);

DetectionReport detect(const EffectiveChannel& h, const CVector& y, double noise_var, int m_c);

}  // namespace afdm
