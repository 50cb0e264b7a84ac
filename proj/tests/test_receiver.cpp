// SPDX-License-Identifier: Apache-2.0
#include "afdm/montecarlo.hpp"
#include "afdm/receiver.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace afdm;
using afdm::test::max_abs;

namespace {

double active_max_error(const CVector& a, const CVector& b, const ActiveSet& act, int n) {
    double e = 0.0;
    for (int q : act.unsigned_indices(n)) e = std::max(e, std::abs(a[q] - b[q]));
    return e;
}

CMatrix random_matrix(int n, std::uint64_t seed) {
    CMatrix m(n, n);
    const CVector v = test::random_gaussian(n * n, seed);
    for (int i = 0; i < n * n; ++i) m(i % n, i / n) = v[i];
    return m;
}

}  // namespace

TEST_CASE("continuous-time receive chain") {
    const WaveformConfig w = test::baseline_waveform(16);
    const ActiveSet act = default_active_set(w);
    const CVector c = test::on_active(test::random_qpsk(16, 31), act);
    const SampledSignal frame = synthesize_td(w, act, c);
    const RxConfig rx = RxConfig::make(w, 0.0);

    SUBCASE("identity channel recovers the symbols") {
        const CVector y = ct_pipeline(frame, DsChannel({{1.0, 0.0, 0.0}}), rx);
        CHECK(active_max_error(y, c, act, 16) < 1e-6);
    }

    SUBCASE("three-path channel matches the matrix model") {
        for (std::uint64_t s = 1; s <= 3; ++s) {
            const DsChannel ch = sample_realization(s, TdlProfile{3, 3.5 * w.t_s, 6.0}, 400.0, 5.8e9);
            const CVector hc = effective_channel_ideal(ch, w, act).h * c;
            const CVector y = ct_pipeline(frame, ch, rx);
            CVector d = CVector::Zero(16);
            for (int q : act.unsigned_indices(16)) d[q] = y[q] - hc[q];
            CHECK(d.norm() / hc.norm() < 1e-3);
        }
    }

    SUBCASE("impairments inside the chain match the impaired matrices") {
        const DsChannel ch = sample_realization(8, TdlProfile{3, 3.5 * w.t_s, 6.0}, 400.0, 5.8e9);
        PipelineImpairments imp;
        imp.pn_cfo = {0.3, 2 * kPi * 200.0, 150.0};
        const CVector y = ct_pipeline(frame, ch, rx, imp);
        const CVector hc = effective_channel_pn_cfo(ch, w, act, imp.pn_cfo).h * c;
        CHECK(active_max_error(y, hc, act, 16) < 1e-3 * max_abs(hc));

        // The jitter matrix drops the per-carrier timing phase 2 pi m (delta0 + n T_s delta1) / (N T_s),
        // so agreement is only to first order in that phase.
        for (const SjParams p : {SjParams{0.02 * w.t_s, 0.0}, SjParams{0.0, 1e-3}, SjParams{1e-3 * w.t_s, 1e-5}}) {
            PipelineImpairments sj;
            sj.sj = p;
            const CVector ys = ct_pipeline(frame, ch, rx, sj);
            const CVector hs = effective_channel_sj(ch, w, act, p).h * c;
            CVector d = CVector::Zero(16);
            for (int q : act.unsigned_indices(16)) d[q] = ys[q] - hs[q];
            const double bound = 2 * kPi * 6 * (p.delta0 / (16 * w.t_s) + p.delta1);
            CHECK(d.norm() / hs.norm() < bound);
        }
    }

    SUBCASE("noise calibration") {
        const RxConfig nrx = RxConfig::make(w, 0.3);
        const SampledSignal zero = synthesize_td(w, act, CVector::Zero(16));
        double acc = 0.0;
        long count = 0;
        for (std::uint64_t s = 0; s < 625; ++s) {
            const CVector y = ct_pipeline(zero, DsChannel({{1.0, 0.0, 0.0}}), nrx, {}, s);
            acc += y.squaredNorm();
            count += y.size();
        }
        CHECK(acc / count == doctest::Approx(0.3).epsilon(0.05));
    }

    SUBCASE("the narrower receive band loses edge carriers") {
        const WaveformConfig w64 = test::baseline_waveform(64);
        const ActiveSet a64 = default_active_set(w64);
        const CVector c64 = test::on_active(test::random_qpsk(64, 32), a64);
        const SampledSignal f64 = synthesize_td(w64, a64, c64);
        RxConfig narrow = RxConfig::make(w64, 0.0);
        CHECK(RxConfig::nominal_bandwidth(w64) < narrow.rx_bandwidth);
        CHECK(active_max_error(ct_pipeline(f64, DsChannel({{1.0, 0.0, 0.0}}), narrow), c64, a64, 64) < 1e-6);
        narrow.rx_bandwidth = RxConfig::nominal_bandwidth(w64);
        CHECK(active_max_error(ct_pipeline(f64, DsChannel({{1.0, 0.0, 0.0}}), narrow), c64, a64, 64) > 1e-2);
    }
}

TEST_CASE("chirp-exponential filter response") {
    const WaveformConfig w = test::baseline_waveform(16);
    SUBCASE("OFDM limit is time invariant") {
        const WaveformConfig o = w.as_ofdm();
        for (double t : {0.0, 1.3 * o.t_s}) {
            const Complex expect = std::exp(Complex(0, 2 * kPi * 3 * t / o.period())) *
                                   std::conj(pulse_spectrum(o.pulse, o.t_s, 3 / o.period()));
            CHECK(std::abs(chirp_filter_response(o.pulse, o, 3, t) - expect) < 1e-5 * std::abs(expect));
        }
    }
    SUBCASE("m = 0, t = 0 is the conjugate pulse AFT at zero") {
        const Complex expect = std::conj(pulse_aft(w.pulse, w.t_s, w.lambda1_bar(), 0.0));
        CHECK(std::abs(chirp_filter_response(w.pulse, w, 0, 0.0) - expect) < 1e-15);
    }
    SUBCASE("direct convolution, m = 5, t = 3 T_s") {
        const double t = 3 * w.t_s;
        const double half = 64 * w.t_s;
        const int steps = 128 * 512;
        const double h = 2 * half / steps;
        Complex acc = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double u = -half + i * h;
            const double s = t + u;
            const Complex x = std::exp(Complex(0, 2 * kPi * (w.lambda1_bar() * s * s + 5 * s / w.period())));
            acc += (i == 0 || i == steps ? 0.5 : 1.0) * x * pulse_time(w.pulse, w.t_s, u);
        }
        acc *= h;
        const Complex got = chirp_filter_response(w.pulse, w, 5, t);
        CHECK(std::abs(got - acc) < 1e-4 * std::abs(acc));
    }
}

TEST_CASE("LMMSE equalizer") {
    const CMatrix eye = CMatrix::Identity(8, 8);
    CHECK((lmmse_matrix(eye, 1.0) - 0.5 * eye).cwiseAbs().maxCoeff() < 1e-15);
    const CMatrix h = random_matrix(16, 4);
    const CMatrix zf = lmmse_matrix(h, 1e-12);
    CHECK((zf - h.inverse()).norm() / h.inverse().norm() < 1e-6);
    const CMatrix g = lmmse_matrix(h, 0.37);
    const CMatrix res = (h.adjoint() * h + 0.37 * CMatrix::Identity(16, 16)) * g - h.adjoint();
    CHECK(res.norm() < 1e-10);
    CHECK((lmmse_matrix(h, 0.0) - h.inverse()).norm() < 1e-9 * h.inverse().norm());
    CHECK_THROWS_AS(lmmse_matrix(h, -1.0), ConfigError);
}

TEST_CASE("SINR") {
    const CMatrix eye = CMatrix::Identity(8, 8);
    for (double v : sinr_per_symbol(eye, 1.0)) CHECK(v == doctest::Approx(1.0));
    for (double v : sinr_per_symbol(eye, 0.1)) CHECK(v == doctest::Approx(10.0));

    SUBCASE("Monte Carlo signal-to-residual ratio") {
        const int n = 8;
        const CMatrix h = random_matrix(n, 7) / std::sqrt(double(n));
        const double s2 = 0.2;
        const RVector sinr = sinr_per_symbol(h, s2);
        const CMatrix g = lmmse_matrix(h, s2);
        const CVector gdiag = (g * h).diagonal();
        Rng rng(99);
        std::normal_distribution<double> gn(0.0, std::sqrt(0.5));
        RVector err = RVector::Zero(n);
        const int draws = 100000;
        for (int d = 0; d < draws; ++d) {
            CVector c(n), w(n);
            for (int i = 0; i < n; ++i) {
                c[i] = Complex(gn(rng), gn(rng));
                w[i] = std::sqrt(s2) * Complex(gn(rng), gn(rng));
            }
            const CVector e = g * (h * c + w);
            for (int i = 0; i < n; ++i) err[i] += std::norm(e[i] - gdiag[i] * c[i]);
        }
        for (int i = 0; i < n; ++i) {
            const double emp = std::norm(gdiag[i]) / (err[i] / draws);
            CHECK(emp == doctest::Approx(sinr[i]).epsilon(0.03));
        }
    }

    SUBCASE("less noise never lowers SINR") {
        const CMatrix h = random_matrix(12, 8);
        RVector prev = sinr_per_symbol(h, 10.0);
        for (double s2 : {3.0, 1.0, 0.3, 0.1, 0.01}) {
            const RVector cur = sinr_per_symbol(h, s2);
            for (int i = 0; i < cur.size(); ++i) {
                CHECK(cur[i] > 0.0);
                CHECK(cur[i] >= prev[i] * (1 - 1e-12));
            }
            prev = cur;
        }
    }

    SUBCASE("a common phase leaves SINR unchanged") {
        const WaveformConfig w = test::baseline_waveform(16);
        const ActiveSet act = default_active_set(w);
        const DsChannel ch = sample_realization(12, TdlProfile{}, 300, 5.8e9);
        const RVector a = sinr_per_symbol(effective_channel_pn_cfo(ch, w, act, {0.0, 0.0, 0.0}), 0.05);
        const RVector b = sinr_per_symbol(effective_channel_pn_cfo(ch, w, act, {1.234, 0.0, 0.0}), 0.05);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("BER prediction") {
    CHECK(q_function(2.0) == doctest::Approx(0.02275).epsilon(1e-3));
    CHECK(q_function(0.0) == doctest::Approx(0.5));
    const RVector four = RVector::Constant(10, 4.0);
    CHECK(theoretical_ber(four, 4) == doctest::Approx(0.0227501319).epsilon(1e-8));
    RVector mixed(3);
    mixed << 1.0, 4.0, 9.0;
    CHECK(theoretical_ber(mixed, 4) == doctest::Approx((q_function(1) + q_function(2) + q_function(3)) / 3));
    CHECK(theoretical_ber(RVector::Constant(4, 1e6), 16) < 1e-100);
    CHECK_THROWS_AS(theoretical_ber(four, 8), ConfigError);
}

TEST_CASE("Gray QAM") {
    const QamMapper q4(4);
    const Complex p00 = q4.map({0, 0})[0];
    CHECK(std::abs(p00 - Complex(1, 1) / std::sqrt(2.0)) < 1e-15);

    for (int m : {4, 16, 64}) {
        const QamMapper q(m);
        double energy = 0.0;
        for (int i = 0; i < m; ++i) energy += std::norm(q.point(i));
        CHECK(energy / m == doctest::Approx(1.0));
        // nearest neighbours differ in exactly one bit
        double dmin = 1e9;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) dmin = std::min(dmin, std::abs(q.point(i) - q.point(j)));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (i == j || std::abs(std::abs(q.point(i) - q.point(j)) - dmin) > 1e-9) continue;
                CHECK(__builtin_popcount(unsigned(i ^ j)) == 1);
            }
        }
        Rng rng(m);
        std::vector<std::uint8_t> bits(size_t(q.bits_per_symbol()) * 200);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        CHECK(qam_demap(qam_map(bits, m), m) == bits);
    }
    CHECK_THROWS_AS(QamMapper(8), ConfigError);
    CHECK_THROWS_AS(qam_map({0, 1, 1}, 4), ConfigError);
}

TEST_CASE("detection") {
    const WaveformConfig w = test::baseline_waveform(16);
    const ActiveSet act = default_active_set(w);
    const EffectiveChannel h = effective_channel_ideal(sample_realization(3, TdlProfile{}, 100, 5.8e9), w, act);
    const CVector c = test::on_active(test::random_qpsk(16, 3), act);
    const DetectionReport r = detect(h, h.h * c, 1e-6, 4);
    CHECK(r.sinr.size() == act.n_u);
    for (int q : h.inputs) CHECK(std::abs(r.symbol_estimates[q] - c[q]) < 1e-3);
    CHECK(r.ber_theory < 1e-10);
}

TEST_CASE("Monte Carlo BER") {
    const WaveformConfig w = test::baseline_waveform(16);
    MonteCarloSpec s;
    s.waveform = w;
    s.active = default_active_set(w);
    s.channel_factory = [](std::uint64_t) { return DsChannel({{1.0, 0.0, 0.0}}); };

    SUBCASE("noiseless identity") {
        s.bits_per_trial = 20000;
        const auto pts = monte_carlo_ber(s, {300.0}, 2, 1);
        CHECK(pts[0].errors == 0);
        CHECK(pts[0].ber_theory_mean == 0.0);
    }
    SUBCASE("AWGN closed form at BER 0.01") {
        const double q = 2.3263478740408408;  // Q(q) = 0.01
        const double snr_db = 10 * std::log10(q * q);
        s.bits_per_trial = 100000;
        const auto pts = monte_carlo_ber(s, {snr_db}, 4, 2, 2);
        CHECK(pts[0].ber_theory_mean == doctest::Approx(0.01).epsilon(1e-6));
        CHECK(pts[0].bits >= 400000);
        CHECK(pts[0].ci_low <= 0.01);
        CHECK(pts[0].ci_high >= 0.01);
    }
    SUBCASE("thread count does not change results") {
        s.channel_factory = nullptr;
        s.v_kmh = 200;
        s.bits_per_trial = 500;
        const auto a = monte_carlo_ber(s, {5.0, 15.0}, 6, 4, 1);
        const auto b = monte_carlo_ber(s, {5.0, 15.0}, 6, 4, 3);
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].ber_theory_mean == b[i].ber_theory_mean);
            CHECK(a[i].errors == b[i].errors);
        }
    }
    SUBCASE("Wilson interval") {
        double lo, hi;
        wilson_interval(0, 100, lo, hi);
        CHECK(lo < 1e-12);
        CHECK(hi == doctest::Approx(0.0370).epsilon(0.01));
        wilson_interval(50, 100, lo, hi);
        CHECK(lo == doctest::Approx(0.4038).epsilon(0.01));
        CHECK(hi == doctest::Approx(0.5962).epsilon(0.01));
    }
}

TEST_CASE("impairment draws") {
    const WaveformConfig w = test::baseline_waveform(64);
    Rng rng(1);
    const ImpairmentDraw none = draw_impairments({ImpairmentKind::PhaseNoise, 0.0}, w, 5.8e9, rng);
    CHECK(none.pn_cfo.phi0 == 0.0);
    double s0 = 0.0, s1 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const ImpairmentDraw d = draw_impairments({ImpairmentKind::PhaseNoise, 0.01}, w, 5.8e9, rng);
        s0 += d.pn_cfo.phi0 * d.pn_cfo.phi0;
        s1 += d.pn_cfo.phi1 * d.pn_cfo.phi1;
    }
    const double t_frame = 68 * w.t_s;
    CHECK(std::sqrt(s0 / n) == doctest::Approx(0.01).epsilon(0.03));
    CHECK(std::sqrt(s1 / n) == doctest::Approx(0.01 / t_frame).epsilon(0.03));
    double sc = 0.0;
    for (int i = 0; i < n; ++i) sc += std::pow(draw_impairments({ImpairmentKind::Cfo, 1e-5}, w, 5.8e9, rng).pn_cfo.cfo, 2);
    CHECK(std::sqrt(sc / n) == doctest::Approx(1e-5 * 1e-6 * 5.8e9).epsilon(0.03));
    const ImpairmentDraw sj = draw_impairments({ImpairmentKind::Jitter, 0.01}, w, 5.8e9, rng);
    CHECK(std::abs(sj.sj.delta1) < 1.0);
    CHECK_THROWS_AS(draw_impairments({ImpairmentKind::Cfo, -1.0}, w, 5.8e9, rng), ConfigError);
}

TEST_CASE("BER grows with speed at 20 dB" * doctest::may_fail()) {
    const WaveformConfig w = test::baseline_waveform(64);
    MonteCarloSpec s;
    s.waveform = w;
    s.active = default_active_set(w);
    s.v_kmh = 50;
    const double slow = monte_carlo_ber(s, {20.0}, 100, 7)[0].ber_theory_mean;
    s.v_kmh = 450;
    const double fast = monte_carlo_ber(s, {20.0}, 100, 7)[0].ber_theory_mean;
    CHECK(fast > slow);
}
