// SPDX-License-Identifier: Apache-2.0
#include "afdm/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace afdm {

std::vector<double> uniform_frequencies(double span, double spacing) {
    if (!(span > 0.0) || !(spacing > 0.0)) throw ConfigError("frequency grid span and spacing must be positive");
    const long half = static_cast<long>(std::floor(0.5 * span / spacing + 1e-9));
    std::vector<double> f;
    f.reserve(static_cast<size_t>(2 * half + 1));
    for (long i = -half; i <= half; ++i) f.push_back(i * spacing);
    return f;
}

std::vector<double> default_psd_frequencies(const WaveformConfig& config) {
    return uniform_frequencies(4.0 / config.t_s, config.delta_f / 8.0);
}

double data_psd(const WaveformConfig& config, const ActiveSet& active, double sigma_c2, double f) {
    const double nt = config.n() + config.n_cpp;
    double acc = 0.0;
    for (int l : active.indices) {
        const double x = kPi * (f - l * config.delta_f) * config.t_s;
        const double den = std::sin(x);
        if (std::abs(den) < 1e-12) {
            acc += nt * nt;
        } else {
            const double num = std::sin(nt * x);
            acc += num * num / (den * den);
        }
    }
    return sigma_c2 / (config.n() * nt) * acc;
}

double data_psd(const WaveformConfig& config, double sigma_c2, double f) {
    return data_psd(config, default_active_set(config), sigma_c2, f);
}

Complex chirp_spectrum_analytic(double lambda1_bar, double f) {
    if (!(lambda1_bar > 0.0)) {
        throw ConfigError("chirp_spectrum_analytic: lambda1_bar must be > 0 (lambda1 = 0 is the delta branch)");
    }
    return Complex(0.5, 0.5) / std::sqrt(lambda1_bar) * std::polar(1.0, -kPi * f * f / (2.0 * lambda1_bar));
}

Complex chirped_pulse_spectrum(const WaveformConfig& config, double f) {
    const double l1bar = config.lambda1_bar();
    if (l1bar == 0.0) return pulse_spectrum(config.pulse, config.t_s, f);
    const double t_s = config.t_s;
    const double window = 0.5 * (config.n() + config.n_cpp) * t_s;
    const double half = std::min(window, pulse_half_support(config.pulse, t_s));
    const int per_ts = 32;
    int steps = static_cast<int>(std::ceil(2.0 * half / t_s * per_ts));
    if (steps % 2) ++steps;
    const double h = 2.0 * half / steps;
    Complex acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = -half + i * h;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * pulse_time(config.pulse, t_s, t) * cexpj(l1bar * t * t - f * t);
    }
    return acc * h / 3.0;
}

PsdGrid analytic_psd(const WaveformConfig& config, const ActiveSet& active, double sigma_c2,
                     const std::vector<double>& freqs) {
    config.validate();
    PsdGrid out;
    out.freqs = freqs;
    out.values.resize(freqs.size());
    for (size_t i = 0; i < freqs.size(); ++i) {
        const double sx = data_psd(config, active, sigma_c2, freqs[i]);
        out.values[i] = sx == 0.0 ? 0.0 : sx * std::norm(chirped_pulse_spectrum(config, freqs[i])) / config.t_s;
    }
    return out;
}

PsdGrid analytic_psd(const WaveformConfig& config, double sigma_c2, const std::vector<double>& freqs) {
    return analytic_psd(config, default_active_set(config), sigma_c2, freqs);
}

PsdGrid normalized(const PsdGrid& psd, const WaveformConfig& config, double sigma_c2) {
    if (!(sigma_c2 > 0.0)) throw ConfigError("normalized: sigma_c2 must be positive");
    PsdGrid out = psd;
    out.norm = sigma_c2 / (config.n() * double(config.n() + config.n_cpp));
    out.normalized = true;
    for (auto& v : out.values) v /= out.norm;
    return out;
}

WelchEstimator::WelchEstimator(double sample_rate, int segment_len, double overlap)
    : fs_(sample_rate), len_(segment_len) {
    if (!(sample_rate > 0.0)) throw ConfigError("welch: sample rate must be positive");
    if (segment_len < 2) throw ConfigError("welch: segment length must be >= 2");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("welch: overlap must lie in [0, 1)");
    hop_ = std::max(1, static_cast<int>(std::lround(segment_len * (1.0 - overlap))));
    window_.resize(static_cast<size_t>(len_));
    for (int i = 0; i < len_; ++i) {
        window_[size_t(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / len_);
        window_power_ += window_[size_t(i)] * window_[size_t(i)];
    }
    acc_.assign(static_cast<size_t>(len_), 0.0);
}

void WelchEstimator::add(const CVector& samples) {
    if (samples.size() == 0) throw ConfigError("welch: empty input");
    if (samples.size() < len_) throw ConfigError("welch: segment length exceeds the record length");
    CVector seg(len_);
    for (Eigen::Index start = 0; start + len_ <= samples.size(); start += hop_) {
        for (int i = 0; i < len_; ++i) seg[i] = samples[start + i] * window_[size_t(i)];
        fft_inplace(seg, false);
        for (int i = 0; i < len_; ++i) acc_[size_t(i)] += std::norm(seg[i]);
        ++segments_;
    }
}

PsdGrid WelchEstimator::result() const {
    if (segments_ == 0) throw ConfigError("welch: no segments accumulated");
    PsdGrid out;
    const double scale = 1.0 / (fs_ * window_power_ * static_cast<double>(segments_));
    for (int k = 0; k < len_; ++k) {
        const int src = static_cast<int>(floor_mod(k - len_ / 2, len_));
        out.freqs.push_back((k - len_ / 2) * fs_ / len_);
        out.values.push_back(acc_[size_t(src)] * scale);
    }
    return out;
}

PsdGrid welch_psd(const CVector& samples, double sample_rate, int segment_len, double overlap) {
    WelchEstimator w(sample_rate, segment_len, overlap);
    w.add(samples);
    return w.result();
}

namespace {

// Integral of the piecewise-linear interpolant over [a, b].
double integrate_linear(const PsdGrid& psd, double a, double b) {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < psd.freqs.size(); ++i) {
        const double f0 = psd.freqs[i];
        const double f1 = psd.freqs[i + 1];
        const double lo = std::max(a, f0);
        const double hi = std::min(b, f1);
        if (hi <= lo) continue;
        const double slope = (psd.values[i + 1] - psd.values[i]) / (f1 - f0);
        const double v_lo = psd.values[i] + slope * (lo - f0);
        const double v_hi = psd.values[i] + slope * (hi - f0);
        acc += 0.5 * (v_lo + v_hi) * (hi - lo);
    }
    return acc;
}

}  // namespace

double oob_energy(const PsdGrid& psd, double band) {
    if (psd.freqs.size() < 2) throw ConfigError("oob_energy: grid too small");
    if (!(band > 0.0) || 0.5 * band > psd.freqs.back() || -0.5 * band < psd.freqs.front()) {
        throw ConfigError("oob_energy: band exceeds the grid extent");
    }
    const double total = integrate_linear(psd, psd.freqs.front(), psd.freqs.back());
    if (!(total > 0.0)) throw NumericalError("oob_energy: PSD has no power");
    const double inband = integrate_linear(psd, -0.5 * band, 0.5 * band);
    const double ratio = (total - inband) / total;
    if (ratio <= 1e-12) return -120.0;
    return std::max(-120.0, 10.0 * std::log10(ratio));
}

SampledSignal synthesize_stream(const WaveformConfig& config, const ActiveSet& active,
                                const std::vector<CVector>& symbols, int tail_symbols) {
    config.validate();
    const int n = config.n();
    const int nc = config.oversample;
    const int nt = n + config.n_cpp;
    const double t_s = config.t_s;
    const double dt = config.sample_step();
    const double l1 = config.daft.lambda1;
    const double l1bar = config.lambda1_bar();
    double half = pulse_half_support(config.pulse, t_s);
    if (std::isinf(half)) half = tail_symbols * t_s;
    const long half_samples = static_cast<long>(std::floor(half / dt));

    std::vector<double> taps(static_cast<size_t>(2 * half_samples + 1));
    for (long j = -half_samples; j <= half_samples; ++j) taps[size_t(j + half_samples)] = pulse_time(config.pulse, t_s, j * dt);

    const long total = static_cast<long>(symbols.size()) * nt * nc;
    SampledSignal out{0.0, dt, CVector::Zero(total)};
    for (size_t i = 0; i < symbols.size(); ++i) {
        check_suppressed(symbols[i], active, n);
        const CVector x = idaft(symbols[i], config.daft);
        // local time origin of frame i sits after its prefix
        const long origin = (static_cast<long>(i) * nt + config.n_cpp) * nc;
        const long first = std::max(0L, origin - config.n_cpp * nc - half_samples);
        const long last = std::min(total - 1, origin + (n - 1) * nc + half_samples);
        for (long s = first; s <= last; ++s) {
            Complex acc = 0.0;
            for (long k = -config.n_cpp; k < n; ++k) {
                const long off = s - origin - k * nc;
                if (off < -half_samples || off > half_samples) continue;
                acc += chirp_extend(x, config.daft, k) * cexpj(-l1 * double(k) * k) * taps[size_t(off + half_samples)];
            }
            const double tl = (s - origin) * dt;
            out.samples[s] += acc * cexpj(l1bar * tl * tl);
        }
    }
    return out;
}

}  // namespace afdm
