// SPDX-License-Identifier: Apache-2.0
#include "afdm/bounds.hpp"
#include "afdm/experiments.hpp"

#include <cmath>
#include <cstdio>

namespace afdm {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

ValidationCheck check(const std::string& name, double value, double limit) {
    return {name, value < limit, "value=" + sci(value) + " limit=" + sci(limit)};
}

CVector random_active_symbols(const ActiveSet& active, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CVector c = CVector::Zero(n);
    for (int q : active.unsigned_indices(n)) c[q] = Complex(g(rng), g(rng));
    return c;
}

double active_error(const CVector& a, const CVector& b, const ActiveSet& active, int n) {
    double e = 0.0;
    for (int q : active.unsigned_indices(n)) e = std::max(e, std::abs(a[q] - b[q]));
    return e;
}

}  // namespace

std::vector<ValidationCheck> run_validation() {
    std::vector<ValidationCheck> out;

    double unit = 0.0;
    for (int n : {2, 4, 8, 64, 256}) {
        const CMatrix a = build_daft_matrix(DaftParams(n, canonical_lambda1(n), canonical_lambda1(n)));
        unit = std::max(unit, (a * a.adjoint() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    out.push_back(check("daft_unitary", unit, 1e-12));

    {
        const int n = 64;
        const CMatrix a = build_daft_matrix(DaftParams(n, 0.0, 0.0));
        double e = 0.0;
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                e = std::max(e, std::abs(a(m, k) - cexpj(-static_cast<double>(m) * k / n) / std::sqrt(double(n))));
        out.push_back(check("daft_ofdm_limit", e, 1e-14));
    }

    {
        const DaftParams p(64, 0.007, 0.003);
        const CVector x = random_active_symbols(full_active_set(64), 64, 5);
        const double e = (daft(x, p) - build_daft_matrix(p) * x).cwiseAbs().maxCoeff();
        const double r = (idaft(daft(x, p), p) - x).cwiseAbs().maxCoeff();
        out.push_back(check("daft_fast_path", std::max(e, r), 1e-12));
    }

    {
        Rng rng(17);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const double theta = u(rng);
            double s = 0.0;
            for (int x = 0; x < 64; ++x) s += std::norm(dirichlet_kernel(64, theta - x / 64.0));
            worst = std::max(worst, std::abs(s - 1.0));
        }
        out.push_back(check("dirichlet_parseval", worst, 1e-10));
    }

    const WaveformConfig w = WaveformConfig::make(DaftParams(16, 0.007, 0.007), 15e3, 4, 10, PulseShape::rrc(0.25));
    const ActiveSet act = default_active_set(w);
    const CVector c = random_active_symbols(act, 16, 23);
    const SampledSignal frame = synthesize_td(w, act, c);
    {
        const SampledSignal fd = synthesize_fd(w, act, c);
        const double e = (frame.samples - fd.samples).cwiseAbs().maxCoeff() / frame.samples.cwiseAbs().maxCoeff();
        out.push_back(check("synthesis_td_fd", e, 1e-10));
    }

    const RxConfig rx = RxConfig::make(w, 0.0);
    {
        const CVector y = ct_pipeline(frame, DsChannel({{Complex(1.0, 0.0), 0.0, 0.0}}), rx);
        out.push_back(check("ideal_recovery", active_error(y, c, act, 16), 1e-6));
    }

    const DsChannel ch = sample_realization(41, TdlProfile{3, 3.5 * w.t_s, 6.0}, 400.0, 5.8e9);
    const EffectiveChannel h = effective_channel_ideal(ch, w, act);
    {
        const CVector hc = h.h * c;
        const CVector y = ct_pipeline(frame, ch, rx);
        CVector d = CVector::Zero(16);
        for (int q : act.unsigned_indices(16)) d[q] = hc[q] - y[q];
        out.push_back(check("matrix_vs_pipeline", d.norm() / hc.norm(), 1e-3));
    }

    {
        const double e1 = (effective_channel_pn_cfo(ch, w, act, {}).h - h.h).cwiseAbs().maxCoeff();
        const double e2 = (effective_channel_sj(ch, w, act, {}).h - h.h).cwiseAbs().maxCoeff();
        out.push_back(check("impairment_off", std::max(e1, e2), 1e-12));
    }

    {
        const double s = 0.1;
        const RVector a = sinr_per_symbol(h, s);
        const CMatrix g = lmmse_matrix(h, s);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, -a[i]);
        const double ber = theoretical_ber(a, 4);
        out.push_back({"lmmse_sinr", worst <= 0.0 && ber > 0.0 && ber < 0.5 && g.allFinite(),
                       "min_sinr=" + sci(a.minCoeff()) + " ber=" + sci(ber)});
    }

    {
        const QamMapper qam(16);
        std::vector<std::uint8_t> bits(4 * 64);
        Rng rng(3);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        const CVector s = qam.map(bits);
        out.push_back({"qam_roundtrip", qam.demap(s) == bits && std::abs(s.squaredNorm() / 64.0 - 1.0) < 0.5, ""});
    }

    {
        const FimResult f = fim_dual(CrbConfig{DaftParams(64, 0.007, 0.007), 49, 1.0, 10.0, 0.0, 0.0});
        out.push_back(check("fim_dual_route", f.max_rel_gap, 1e-6));
    }

    {
        double e = 0.0;
        for (double t : {0.0, 0.3 * w.t_s, 2.7 * w.t_s}) {
            const Complex closed = chirp_filter_response(w.pulse, w, 3, t);
            // Direct convolution of exp(j2pi(l s^2 + m s/T)) with p*(-s), trapezoid over the pulse.
            const double half = 64.0 * w.t_s;
            const int steps = 2 * 64 * 256;
            const double ds = 2.0 * half / steps;
            Complex acc = 0.0;
            for (int i = 0; i <= steps; ++i) {
                const double s = -half + i * ds;
                const double u = t - s;
                const Complex v = pulse_time(w.pulse, w.t_s, s) *
                                  cexpj(w.lambda1_bar() * u * u + 3.0 * u / w.period());
                acc += (i == 0 || i == steps ? 0.5 : 1.0) * v;
            }
            acc *= ds;
            e = std::max(e, std::abs(closed - acc) / std::sqrt(w.t_s));
        }
        out.push_back(check("chirp_filter_closed_form", e, 1e-4));
    }

    {
        MonteCarloSpec s;
        s.waveform = w;
        s.active = act;
        s.v_kmh = 300.0;
        const auto a = monte_carlo_ber(s, {10.0}, 3, 9, 1);
        const auto b = monte_carlo_ber(s, {10.0}, 3, 9, 2);
        out.push_back({"monte_carlo_determinism", a[0].ber_theory_mean == b[0].ber_theory_mean,
                       "ber=" + sci(a[0].ber_theory_mean)});
    }
    return out;
}

}  // namespace afdm
