// SPDX-License-Identifier: Apache-2.0
#include "afdm/channel.hpp"

#include "afdm/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace afdm {

DsChannel::DsChannel(std::vector<ChannelPath> paths) : paths_(std::move(paths)) {
    if (paths_.empty()) throw ConfigError("channel must have at least one path");
    for (const auto& p : paths_) {
        if (!(p.delay >= 0.0) || !std::isfinite(p.delay)) throw ConfigError("channel path delay must be >= 0");
        if (!std::isfinite(p.doppler) || !std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag())) {
            throw ConfigError("channel path gain/doppler must be finite");
        }
    }
    std::stable_sort(paths_.begin(), paths_.end(),
                     [](const ChannelPath& a, const ChannelPath& b) { return a.delay < b.delay; });
}

double DsChannel::total_power() const {
    double acc = 0.0;
    for (const auto& p : paths_) acc += std::norm(p.gain);
    return acc;
}

void SjParams::validate() const {
    if (!(std::abs(delta1) < 1.0)) throw ConfigError("sampling skew delta1 must satisfy |delta1| < 1");
    if (!std::isfinite(delta0)) throw ConfigError("sampling offset delta0 must be finite");
}

CMatrix EffectiveChannel::submatrix() const {
    CMatrix s(static_cast<Eigen::Index>(outputs.size()), static_cast<Eigen::Index>(inputs.size()));
    for (size_t r = 0; r < outputs.size(); ++r) {
        for (size_t c = 0; c < inputs.size(); ++c) s(Eigen::Index(r), Eigen::Index(c)) = h(outputs[r], inputs[c]);
    }
    return s;
}

Complex dirichlet_kernel(int order, double theta) {
    if (order < 1) throw ConfigError("dirichlet_kernel: order must be >= 1");
    // exp(-j2pi x) - 1 = -2j sin(pi x) exp(-j pi x); the sine form avoids cancellation near integers
    const double k = std::round(theta);
    const double r = theta - k;
    const double den = std::sin(kPi * r);
    if (2.0 * std::abs(den) < 1e-12) return 1.0;
    const long kl = static_cast<long>(k);
    const double sign = ((kl % 2 != 0) != ((kl * order) % 2 != 0)) ? -1.0 : 1.0;
    const double num = std::sin(kPi * order * r);
    return sign * num / (order * den) * cexpj(-0.5 * theta * (order - 1));
}

namespace {

// Gain referred to the first sampling instant t = tau_max.
Complex referred_gain(const ChannelPath& p, double tau_max, double l1bar) {
    const double tau = p.delay;
    return p.gain * cexpj(l1bar * tau * tau) * cexpj(-p.doppler * tau) *
           cexpj(l1bar * tau_max * tau_max) * cexpj((p.doppler - 2.0 * l1bar * tau) * tau_max);
}

}  // namespace

std::vector<NormalizedPath> normalize_paths(const DsChannel& channel, const WaveformConfig& config) {
    const double tau_max = channel.max_delay();
    const double n = config.n();
    const double l1bar = config.lambda1_bar();
    std::vector<NormalizedPath> out;
    for (size_t l = 0; l < channel.size(); ++l) {
        const auto& p = channel.paths()[l];
        NormalizedPath np{referred_gain(p, tau_max, l1bar), (tau_max - p.delay) / (n * config.t_s),
                          p.doppler / config.delta_f};
        // The Doppler bound is closed so that exactly one bin of shift stays admissible.
        if (!(std::abs(n * np.f_tau) < n) || !(std::abs(np.f_nu) <= 1.0 + 1e-12)) {
            throw ConfigError("path " + std::to_string(l) +
                              " violates |N F_tau| < N or |N F_nu| <= N for this waveform");
        }
        out.push_back(np);
    }
    return out;
}

EffectiveChannel build_effective_channel(const std::vector<KernelPath>& paths,
                                         const WaveformConfig& config, const ActiveSet& active,
                                         ChannelVariant variant) {
    const int n = config.n();
    const double l2 = config.daft.lambda2;
    const auto idx = active.unsigned_indices(n);
    EffectiveChannel out;
    out.variant = variant;
    out.inputs = idx;
    out.outputs = idx;
    out.h = CMatrix::Zero(n, n);
    for (int q : idx) {
        const long sq = signed_index(q, n);
        // P(m df) * U*_m / T_s with U = sqrt(T_s) on the receive band
        const Complex pulse_factor =
            pulse_spectrum(config.pulse, config.t_s, sq * config.delta_f) / std::sqrt(config.t_s);
        for (int p : idx) {
            Complex acc = 0.0;
            for (const auto& kp : paths) {
                acc += kp.gain * cexpj(static_cast<double>(sq) * kp.f_tau) *
                       dirichlet_kernel(n, static_cast<double>(p - q) / n - kp.theta);
            }
            const double quad = static_cast<double>(q) * q - static_cast<double>(p) * p;
            out.h(p, q) = pulse_factor * cexpj(l2 * quad) * acc;
        }
    }
    return out;
}

EffectiveChannel effective_channel_ideal(const DsChannel& channel, const WaveformConfig& config,
                                         const ActiveSet& active) {
    const double n = config.n();
    const double l1 = config.daft.lambda1;
    std::vector<KernelPath> kp;
    for (const auto& p : normalize_paths(channel, config)) {
        kp.push_back({p.gain, p.f_tau, p.f_nu / n + 2.0 * l1 * n * p.f_tau});
    }
    return build_effective_channel(kp, config, active, ChannelVariant::Ideal);
}

EffectiveChannel effective_channel_pn_cfo(const DsChannel& channel, const WaveformConfig& config,
                                          const ActiveSet& active, const PnCfoParams& imp) {
    if (!std::isfinite(imp.phi0) || !std::isfinite(imp.phi1) || !std::isfinite(imp.cfo)) {
        throw ConfigError("PN/CFO parameters must be finite");
    }
    const double n = config.n();
    const double l1 = config.daft.lambda1;
    const double f_cfo = imp.cfo / config.delta_f;
    // linear phase ramp phi1 (rad/s) advances phi1*T_s/(2 pi) cycles per sample
    const double ramp = imp.phi1 * config.t_s / (2.0 * kPi);
    const Complex common = std::polar(1.0, imp.phi0);
    std::vector<KernelPath> kp;
    for (const auto& p : normalize_paths(channel, config)) {
        kp.push_back({p.gain * common, p.f_tau, (p.f_nu + f_cfo) / n + 2.0 * l1 * n * p.f_tau + ramp});
    }
    return build_effective_channel(kp, config, active, ChannelVariant::PnCfo);
}

EffectiveChannel effective_channel_sj(const DsChannel& channel, const WaveformConfig& config,
                                      const ActiveSet& active, const SjParams& imp) {
    imp.validate();
    const double n = config.n();
    const double l1 = config.daft.lambda1;
    const double l1bar = config.lambda1_bar();
    const double tau_max = channel.max_delay();
    const auto norm = normalize_paths(channel, config);
    std::vector<KernelPath> kp;
    for (size_t l = 0; l < norm.size(); ++l) {
        const auto& path = channel.paths()[l];
        const Complex gain = norm[l].gain * cexpj((path.doppler - 2.0 * l1bar * path.delay) * imp.delta0);
        const double f_nu_sj = norm[l].f_nu * (1.0 + imp.delta1);
        const double f_tau_sj = (tau_max - path.delay * (1.0 + imp.delta1)) / (n * config.t_s);
        kp.push_back({gain, norm[l].f_tau, f_nu_sj / n + 2.0 * l1 * n * f_tau_sj});
    }
    return build_effective_channel(kp, config, active, ChannelVariant::Sj);
}

EffectiveChannel dt_reference_channel(const DsChannel& channel, const WaveformConfig& config,
                                      const ActiveSet& active) {
    const int n = config.n();
    const double t_s = config.t_s;
    if (channel.max_delay() > config.n_cpp * t_s * (1.0 + 1e-12)) {
        throw ConfigError("dt_reference_channel: channel delay exceeds the CPP span");
    }
    std::vector<long> bins;
    for (const auto& p : channel.paths()) bins.push_back(std::lround(p.delay / t_s));
    const long dmax = *std::max_element(bins.begin(), bins.end());

    // Time-domain map r = H_time x on the chirp-periodic sequence.
    CMatrix h_time = CMatrix::Zero(n, n);
    for (size_t l = 0; l < channel.size(); ++l) {
        const auto& p = channel.paths()[l];
        const long shift = dmax - bins[l];
        const double tau = bins[l] * t_s;
        const Complex g = p.gain * cexpj(p.doppler * (dmax * t_s - tau));
        for (int k = 0; k < n; ++k) {
            const long src = k + shift;
            const long idx = floor_mod(src, n);
            const long lap = (src - idx) / n;
            const long long poly = static_cast<long long>(lap) * lap * n * n + 2LL * idx * lap * n;
            h_time(k, idx) += g * cexpj(p.doppler * k * t_s) *
                              cexpj(config.daft.lambda1 * static_cast<double>(poly));
        }
    }
    const CMatrix a = build_daft_matrix(config.daft);
    EffectiveChannel out;
    out.variant = ChannelVariant::DtReference;
    out.h = a * h_time * a.adjoint();
    out.inputs = active.unsigned_indices(n);
    out.outputs.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.outputs[static_cast<size_t>(i)] = i;
    return out;
}

EffectiveChannel dt_reference_channel(const DsChannel& channel, const WaveformConfig& config) {
    return dt_reference_channel(channel, config, full_active_set(config.n()));
}

CVector impulse_response(const EffectiveChannel& h_eff) {
    const Eigen::Index n = h_eff.h.rows();
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = h_eff.h(floor_mod(long(i) - long(n / 2), long(n)), 0);
    return out;
}

double max_doppler_hz(double v_kmh, double f_c) { return v_kmh / 3.6 * f_c / kSpeedOfLight; }

DsChannel sample_realization(std::uint64_t seed, const TdlProfile& profile, double v_kmh, double f_c) {
    if (profile.n_paths < 1) throw ConfigError("channel.paths must be >= 1");
    if (!(profile.delay_spread >= 0.0)) throw ConfigError("channel.delay_spread must be >= 0");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double nu_max = max_doppler_hz(v_kmh, f_c);
    std::vector<double> delays{0.0};
    for (int l = 1; l < profile.n_paths; ++l) delays.push_back(profile.delay_spread * unit(rng));
    std::sort(delays.begin(), delays.end());
    std::vector<ChannelPath> paths;
    double power = 0.0;
    for (double tau : delays) {
        const double rel = profile.delay_spread > 0.0 ? tau / profile.delay_spread : 0.0;
        const double mean_power = std::pow(10.0, -profile.pdp_decay_db * rel / 10.0);
        const double re = gauss(rng);
        const double im = gauss(rng);
        const Complex g = Complex(re, im) * std::sqrt(mean_power / 2.0);
        const double angle = 2.0 * kPi * unit(rng);
        paths.push_back({g, tau, nu_max * std::cos(angle)});
        power += std::norm(g);
    }
    for (auto& p : paths) p.gain /= std::sqrt(power);
    return DsChannel(std::move(paths));
}

std::string channel_to_csv(const DsChannel& channel) {
    std::ostringstream os;
    os << "l,gain_re,gain_im,delay_s,doppler_hz\n";
    char buf[160];
    for (size_t l = 0; l < channel.size(); ++l) {
        const auto& p = channel.paths()[l];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", l, p.gain.real(), p.gain.imag(),
                      p.delay, p.doppler);
        os << buf;
    }
    return os.str();
}

DsChannel channel_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<ChannelPath> paths;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            if (line.rfind("l,", 0) == 0) continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 5) throw ConfigError("channel CSV row must have 5 columns: " + line);
        paths.push_back({Complex(v[1], v[2]), v[3], v[4]});
    }
    return DsChannel(std::move(paths));
}

}  // namespace afdm
