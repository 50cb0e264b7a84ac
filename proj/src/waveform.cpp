// SPDX-License-Identifier: Apache-2.0
#include "afdm/waveform.hpp"

#include <algorithm>
#include <cmath>

namespace afdm {

WaveformConfig WaveformConfig::make(DaftParams daft, double delta_f, int n_cpp, int oversample,
                                    PulseShape pulse) {
    WaveformConfig c;
    c.daft = daft;
    c.delta_f = delta_f;
    c.t_s = 1.0 / (daft.n * delta_f);
    c.n_cpp = n_cpp;
    c.oversample = oversample;
    c.pulse = pulse;
    c.validate();
    return c;
}

void WaveformConfig::validate() const {
    daft.validate();
    pulse.validate();
    if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
        throw ConfigError("waveform.delta_f must be positive");
    }
    if (std::abs(t_s * delta_f * daft.n - 1.0) > 1e-12) {
        throw ConfigError("waveform.t_s must equal 1/(N delta_f)");
    }
    if (n_cpp < 0) throw ConfigError("waveform.n_cpp must be non-negative");
    if (oversample < 2) throw ConfigError("waveform.oversample must be >= 2");
}

WaveformConfig WaveformConfig::as_ofdm() const {
    WaveformConfig c = *this;
    c.daft.lambda1 = 0.0;
    c.daft.lambda2 = 0.0;
    return c;
}

bool ActiveSet::contains_signed(long m) const {
    return std::binary_search(indices.begin(), indices.end(), static_cast<int>(m));
}

std::vector<bool> ActiveSet::mask(int n) const {
    std::vector<bool> out(static_cast<size_t>(n), false);
    for (int m : indices) out[static_cast<size_t>(floor_mod(m, n))] = true;
    return out;
}

std::vector<int> ActiveSet::unsigned_indices(int n) const {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int m : indices) out.push_back(static_cast<int>(floor_mod(m, n)));
    std::sort(out.begin(), out.end());
    return out;
}

ActiveSet active_subcarriers(const PulseShape& pulse, int n, double tolerance, double t_s) {
    if (n < 2 || n % 2) throw ConfigError("active_subcarriers: n must be even and >= 2");
    ActiveSet out;
    if (pulse.is_rrc()) {
        const int n_alpha = static_cast<int>(std::floor(n * (1.0 - pulse.param) / 2.0 + 1e-12));
        for (int m = -n_alpha; m <= n_alpha; ++m) out.indices.push_back(m);
        out.n_u = static_cast<int>(out.indices.size());
        return out;
    }
    if (!(tolerance > 0.0 && tolerance < 1.0)) {
        throw ConfigError("active_subcarriers: tolerance must lie in (0, 1)");
    }
    const double df = 1.0 / (n * t_s);
    const double peak = std::abs(pulse_spectrum(pulse, t_s, 0.0));
    const double floor_level = tolerance * peak;
    const double alias_level = (1.0 - tolerance) * tolerance * peak;
    for (int m = -n / 2; m < n / 2; ++m) {
        if (std::abs(pulse_spectrum(pulse, t_s, m * df)) < floor_level) continue;
        bool clean = true;
        for (int k : {-2, -1, 1, 2}) {
            if (std::abs(pulse_spectrum(pulse, t_s, (m + k * n) * df)) >= alias_level) clean = false;
        }
        if (clean) out.indices.push_back(m);
    }
    out.n_u = static_cast<int>(out.indices.size());
    if (out.n_u == 0) throw ConfigError("active_subcarriers: no carrier passes the tolerance rule");
    return out;
}

ActiveSet default_active_set(const WaveformConfig& config) {
    return active_subcarriers(config.pulse, config.n(), kDefaultActiveTolerance, config.t_s);
}

ActiveSet full_active_set(int n) {
    ActiveSet out;
    for (int m = -n / 2; m < n / 2; ++m) out.indices.push_back(m);
    out.n_u = n;
    return out;
}

void check_suppressed(const CVector& c, const ActiveSet& active, int n) {
    if (c.size() != n) {
        throw ConfigError("symbol vector length " + std::to_string(c.size()) + " != n = " +
                          std::to_string(n));
    }
    const auto mask = active.mask(n);
    for (int q = 0; q < n; ++q) {
        if (!mask[static_cast<size_t>(q)] && c[q] != Complex(0.0, 0.0)) {
            throw ConfigError("symbol " + std::to_string(q) + " (subcarrier " +
                              std::to_string(signed_index(q, n)) +
                              ") is nonzero on a suppressed carrier");
        }
    }
}

SampledSignal synthesize_window(const WaveformConfig& config, const ActiveSet& active,
                                const CVector& c, double t0, Eigen::Index count, double dt) {
    config.validate();
    check_suppressed(c, active, config.n());
    const int n = config.n();
    const double t_s = config.t_s;
    const double period = config.period();
    const double l1bar = config.lambda1_bar();
    const CVector x = idaft(c, config.daft);

    SampledSignal out{t0, dt, CVector::Zero(count)};
    const double half = pulse_half_support(config.pulse, t_s);

    if (std::isinf(half)) {
        // Folded form: s(t) = chirp(t) sum_{k<N} w_k p_T(t - k T_s), with w the N-periodic
        // dechirped sequence. Tabulate p_T when the grid is commensurate with T_s.
        CVector w(n);
        for (int k = 0; k < n; ++k) w[k] = x[k] * cexpj(-config.daft.lambda1 * double(k) * k);
        const double ratio = t_s / dt;
        const long nc = std::lround(ratio);
        const bool aligned = nc > 0 && std::abs(ratio - nc) < 1e-9;
        std::vector<double> table;
        const long tlen = aligned ? nc * n : 0;
        if (aligned) {
            table.resize(static_cast<size_t>(tlen));
            for (long j = 0; j < tlen; ++j) {
                table[static_cast<size_t>(j)] = periodized_pulse(config.pulse, t_s, period, t0 + j * dt);
            }
        }
        for (Eigen::Index i = 0; i < count; ++i) {
            const double t = out.time(i);
            Complex acc = 0.0;
            for (int k = 0; k < n; ++k) {
                const double pt = aligned
                    ? table[static_cast<size_t>(floor_mod(static_cast<long>(i) - k * nc, tlen))]
                    : periodized_pulse(config.pulse, t_s, period, t - k * t_s);
                acc += w[k] * pt;
            }
            out.samples[i] = acc * cexpj(l1bar * t * t);
        }
        return out;
    }

    // Finite support: direct sum over the chirp-periodic extension.
    for (Eigen::Index i = 0; i < count; ++i) {
        const double t = out.time(i);
        const long kmin = static_cast<long>(std::ceil((t - half) / t_s));
        const long kmax = static_cast<long>(std::floor((t + half) / t_s));
        Complex acc = 0.0;
        for (long k = kmin; k <= kmax; ++k) {
            const double p = pulse_time(config.pulse, t_s, t - k * t_s);
            if (p == 0.0) continue;
            acc += chirp_extend(x, config.daft, k) * cexpj(-config.daft.lambda1 * double(k) * k) * p;
        }
        out.samples[i] = acc * cexpj(l1bar * t * t);
    }
    return out;
}

SampledSignal synthesize_td(const WaveformConfig& config, const ActiveSet& active, const CVector& c) {
    return synthesize_window(config, active, c, config.frame_start(), config.frame_samples(),
                             config.sample_step());
}

SampledSignal synthesize_td(const WaveformConfig& config, const CVector& c) {
    return synthesize_td(config, default_active_set(config), c);
}

Complex subcarrier_coefficient(const WaveformConfig& config, const CVector& c, long m) {
    const double n = config.n();
    return symbol_extend(c, config.daft, m) * cexpj(config.daft.lambda2 * double(m) * m) *
           pulse_spectrum(config.pulse, config.t_s, m * config.delta_f) /
           (std::sqrt(n) * config.t_s);
}

SampledSignal synthesize_fd(const WaveformConfig& config, const ActiveSet& active, const CVector& c) {
    config.validate();
    check_suppressed(c, active, config.n());
    std::vector<Complex> coef;
    for (int m : active.indices) coef.push_back(subcarrier_coefficient(config, c, m));
    SampledSignal out{config.frame_start(), config.sample_step(), CVector::Zero(config.frame_samples())};
    const double l1bar = config.lambda1_bar();
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double t = out.time(i);
        Complex acc = 0.0;
        for (size_t j = 0; j < coef.size(); ++j) {
            acc += coef[j] * cexpj(active.indices[j] * config.delta_f * t);
        }
        out.samples[i] = acc * cexpj(l1bar * t * t);
    }
    return out;
}

SampledSignal synthesize_fd(const WaveformConfig& config, const CVector& c) {
    return synthesize_fd(config, default_active_set(config), c);
}

}  // namespace afdm
