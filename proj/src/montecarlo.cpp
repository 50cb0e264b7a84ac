// SPDX-License-Identifier: Apache-2.0
#include "afdm/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace afdm {

ImpairmentDraw draw_impairments(const ImpairmentSpec& spec, const WaveformConfig& waveform,
                                double carrier_hz, Rng& rng) {
    ImpairmentDraw d;
    if (spec.kind == ImpairmentKind::None || spec.sigma == 0.0) return d;
    if (!(spec.sigma > 0.0)) throw ConfigError("impairment sigma must be >= 0");
    std::normal_distribution<double> g(0.0, 1.0);
    const double t_frame = (waveform.n() + waveform.n_cpp) * waveform.t_s;
    switch (spec.kind) {
        case ImpairmentKind::PhaseNoise:
            d.pn_cfo.phi0 = spec.sigma * g(rng);
            d.pn_cfo.phi1 = spec.sigma / t_frame * g(rng);
            break;
        case ImpairmentKind::Cfo:
            d.pn_cfo.cfo = spec.sigma * 1e-6 * carrier_hz * g(rng);
            break;
        case ImpairmentKind::Jitter:
            d.sj.delta0 = spec.sigma * waveform.t_s * g(rng);
            d.sj.delta1 = spec.sigma * g(rng);
            if (!(std::abs(d.sj.delta1) < 1.0)) throw NumericalError("sampling skew draw |delta1| >= 1");
            break;
        case ImpairmentKind::None: break;
    }
    return d;
}

EffectiveChannel trial_channel(const MonteCarloSpec& spec, const DsChannel& channel, const ImpairmentDraw& draw) {
    if (spec.model == ChannelModel::DiscreteTime) return dt_reference_channel(channel, spec.waveform, spec.active);
    switch (spec.impairment.kind) {
        case ImpairmentKind::PhaseNoise:
        case ImpairmentKind::Cfo:
            return effective_channel_pn_cfo(channel, spec.waveform, spec.active, draw.pn_cfo);
        case ImpairmentKind::Jitter:
            return effective_channel_sj(channel, spec.waveform, spec.active, draw.sj);
        case ImpairmentKind::None: break;
    }
    return effective_channel_ideal(channel, spec.waveform, spec.active);
}

void wilson_interval(long errors, long trials, double& lo, double& hi) {
    if (trials <= 0) {
        lo = hi = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = errors / n;
    const double den = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / den;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

struct TrialResult {
    std::vector<double> theory;
    std::vector<long> bits;
    std::vector<long> errors;
};

}  // namespace

std::vector<BerPoint> monte_carlo_ber(const MonteCarloSpec& spec, const std::vector<double>& snr_db,
                                      int n_trials, std::uint64_t seed, int threads) {
    if (n_trials < 1) throw ConfigError("trials must be >= 1");
    if (snr_db.empty()) throw ConfigError("SNR grid must be non-empty");
    const QamMapper qam(spec.m_c);
    const size_t ns = snr_db.size();
    std::vector<TrialResult> results(static_cast<size_t>(n_trials));

    parallel_for(n_trials, threads, [&](int trial) {
        const auto ut = static_cast<std::uint64_t>(trial);
        const DsChannel channel = spec.channel_factory
            ? spec.channel_factory(derive_seed(seed, {ut, 1}))
            : sample_realization(derive_seed(seed, {ut, 1}), spec.profile, spec.v_kmh, spec.carrier_hz);
        Rng imp_rng(derive_seed(seed, {ut, 2}));
        const ImpairmentDraw draw = draw_impairments(spec.impairment, spec.waveform, spec.carrier_hz, imp_rng);
        const EffectiveChannel h = trial_channel(spec, channel, draw);
        const CMatrix hs = h.submatrix();
        TrialResult res{std::vector<double>(ns), std::vector<long>(ns, 0), std::vector<long>(ns, 0)};
        for (size_t s = 0; s < ns; ++s) {
            const double noise_var = std::pow(10.0, -snr_db[s] / 10.0);
            const CMatrix g = lmmse_matrix(hs, noise_var);
            const CMatrix gbar = g * hs;
            RVector sinr(gbar.cols());
            for (Eigen::Index i = 0; i < gbar.cols(); ++i) {
                const double gi = gbar(i, i).real();
                if (gi <= -1e-9 || gi >= 1.0 + 1e-9) throw NumericalError("monte_carlo_ber: G*H diagonal outside (0,1)");
                sinr[i] = std::clamp(gi, 0.0, 1.0 - 1e-300) / (1.0 - std::clamp(gi, 0.0, 1.0 - 1e-300));
            }
            res.theory[s] = theoretical_ber(sinr, spec.m_c);
            if (spec.bits_per_trial <= 0) continue;
            const long bits_per_frame = static_cast<long>(hs.cols()) * qam.bits_per_symbol();
            const long frames = (spec.bits_per_trial + bits_per_frame - 1) / bits_per_frame;
            Rng rng(derive_seed(seed, {ut, 3, static_cast<std::uint64_t>(s)}));
            std::uniform_int_distribution<int> bit(0, 1);
            std::normal_distribution<double> gn(0.0, std::sqrt(noise_var / 2.0));
            std::vector<std::uint8_t> bits(static_cast<size_t>(bits_per_frame));
            CVector noise(hs.rows());
            for (long f = 0; f < frames; ++f) {
                for (auto& b : bits) b = static_cast<std::uint8_t>(bit(rng));
                const CVector c = qam.map(bits);
                for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = Complex(gn(rng), gn(rng));
                CVector est = g * (hs * c + noise);
                for (Eigen::Index i = 0; i < est.size(); ++i) est[i] /= gbar(i, i).real();
                const auto dec = qam.demap(est);
                long err = 0;
                for (size_t b = 0; b < bits.size(); ++b) err += dec[b] != bits[b];
                res.errors[s] += err;
                res.bits[s] += bits_per_frame;
            }
        }
        results[static_cast<size_t>(trial)] = std::move(res);
    });

    std::vector<BerPoint> out(ns);
    for (size_t s = 0; s < ns; ++s) {
        BerPoint& p = out[s];
        p.snr_db = snr_db[s];
        p.trials = n_trials;
        double acc = 0.0;
        for (const auto& r : results) {
            acc += r.theory[s];
            p.bits += r.bits[s];
            p.errors += r.errors[s];
        }
        p.ber_theory_mean = acc / n_trials;
        if (p.bits > 0) {
            p.ber_empirical_mean = double(p.errors) / double(p.bits);
            wilson_interval(p.errors, p.bits, p.ci_low, p.ci_high);
        } else {
            p.ber_empirical_mean = p.ci_low = p.ci_high = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

}  // namespace afdm
