// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/waveform.hpp"

#include <vector>

namespace afdm {

struct PsdGrid {
    std::vector<double> freqs;   // Hz, ascending, uniform
    std::vector<double> values;  // linear PSD
    double norm = 1.0;           // sigma_c^2/(N N_T) when normalized, else 1
    bool normalized = false;

    double spacing() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

// Span 4/T_s centered on 0, spacing delta_f/8.
std::vector<double> default_psd_frequencies(const WaveformConfig& config);
std::vector<double> uniform_frequencies(double span, double spacing);

// Average PSD of the extended DT sequence over the active carriers.
double data_psd(const WaveformConfig& config, const ActiveSet& active, double sigma_c2, double f);
double data_psd(const WaveformConfig& config, double sigma_c2, double f);

// Fourier transform of exp(j2pi lambda1_bar t^2): (1+j)/(2 sqrt(lambda1_bar)) exp(-j pi f^2/(2 lambda1_bar)).
Complex chirp_spectrum_analytic(double lambda1_bar, double f);

// Spectrum of p(t) exp(j2pi lambda1_bar t^2) with the chirp limited to |t| <= N_T T_s / 2.
// Equals P(f) when lambda1 = 0.
Complex chirped_pulse_spectrum(const WaveformConfig& config, double f);

PsdGrid analytic_psd(const WaveformConfig& config, const ActiveSet& active, double sigma_c2,
                     const std::vector<double>& freqs);
PsdGrid analytic_psd(const WaveformConfig& config, double sigma_c2, const std::vector<double>& freqs);

// Divides by sigma_c^2/(N N_T).
PsdGrid normalized(const PsdGrid& psd, const WaveformConfig& config, double sigma_c2);

// Averaged Hann-windowed periodograms, two-sided, frequencies from -fs/2.
class WelchEstimator {
public:
    WelchEstimator(double sample_rate, int segment_len, double overlap);
    void add(const CVector& samples);
    PsdGrid result() const;
    long segments() const { return segments_; }

private:
    double fs_;
    int len_;
    int hop_;
    std::vector<double> window_;
    double window_power_ = 0.0;
    std::vector<double> acc_;
    long segments_ = 0;
};

PsdGrid welch_psd(const CVector& samples, double sample_rate, int segment_len, double overlap);

// 10 log10 of the power outside [-band/2, band/2] over the total power; floor -120 dB.
double oob_energy(const PsdGrid& psd, double band);

// Back-to-back frames, each the finite CPP-prefixed sum over k in [-N_cpp, N) with its own chirp,
// sampled at T_s/N_c. Untruncated pulses are cut at +-tail_symbols*T_s.
SampledSignal synthesize_stream(const WaveformConfig& config, const ActiveSet& active,
                                const std::vector<CVector>& symbols, int tail_symbols = 32);

}  // namespace afdm
