// SPDX-License-Identifier: Apache-2.0
#include "afdm/channel.hpp"
#include "afdm/experiments.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace afdm;

namespace {

Complex dirichlet_direct(int x_order, double theta) {
    Complex acc = 0.0;
    for (int x = 0; x < x_order; ++x) acc += std::exp(Complex(0, -2 * kPi * theta * x));
    return acc / double(x_order);
}

DsChannel single(Complex a, double tau, double nu) { return DsChannel({{a, tau, nu}}); }

WaveformConfig ofdm16() {
    return WaveformConfig::make(DaftParams(16, 0.0, 0.0), 15e3, 4, 10, PulseShape::rrc(0.25));
}

}  // namespace

TEST_CASE("Dirichlet kernel") {
    CHECK(std::abs(dirichlet_kernel(8, 0.0) - 1.0) < 1e-15);
    for (int k = 1; k < 8; ++k) CHECK(std::abs(dirichlet_kernel(8, k / 8.0)) < 1e-15);
    CHECK(std::abs(dirichlet_kernel(4, 1.0 / 8) - dirichlet_direct(4, 1.0 / 8)) < 1e-15);
    for (double th : {-2.3, -1.0, -1e-9, 3e-13, 0.49, 1.0 + 1e-10, 5.7})
        CHECK(std::abs(dirichlet_kernel(64, th) - dirichlet_direct(64, th)) < 1e-12);
    CHECK_THROWS_AS(dirichlet_kernel(0, 0.1), ConfigError);

    SUBCASE("Parseval identity over random theta") {
        Rng rng(123);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int t = 0; t < 100; ++t) {
            const double theta = u(rng);
            double s = 0.0;
            for (int x = 0; x < 64; ++x) s += std::norm(dirichlet_kernel(64, theta - x / 64.0));
            CHECK(std::abs(s - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("channel construction and normalization") {
    const WaveformConfig w = test::baseline_waveform(64, 8);
    CHECK_THROWS_AS(DsChannel({}), ConfigError);
    CHECK_THROWS_AS(DsChannel({{1.0, -1e-6, 0.0}}), ConfigError);

    const auto p0 = normalize_paths(single(1.0, 0.0, 0.0), w);
    CHECK(std::abs(p0[0].gain - 1.0) < 1e-15);
    CHECK(p0[0].f_tau == 0.0);
    CHECK(p0[0].f_nu == 0.0);

    const auto p1 = normalize_paths(DsChannel({{1.0, 2e-6, 10.0}, {0.5, 2e-6, -30.0}}), w);
    CHECK(p1[0].f_tau == 0.0);
    CHECK(p1[1].f_tau == 0.0);

    const DsChannel ch({{1.0, 3 * w.t_s, 100.0}, {1.0, 1.1 * w.t_s, 0.0}, {1.0, 6 * w.t_s, -2000.0}});
    CHECK(ch.paths()[0].delay == doctest::Approx(1.1 * w.t_s));
    const auto p3 = normalize_paths(ch, w);
    CHECK(p3[0].f_tau == doctest::Approx(4.9 / 64));
    CHECK(p3[1].f_tau == doctest::Approx(3.0 / 64));
    CHECK(p3[2].f_tau == doctest::Approx(0.0));
    CHECK(p3[2].f_nu == doctest::Approx(-2000.0 / 15e3));

    CHECK_THROWS_AS(normalize_paths(single(1.0, 0.0, 64 * 15e3), w), ConfigError);
}

TEST_CASE("ideal effective channel") {
    SUBCASE("single static path is the active-set indicator") {
        const WaveformConfig w = test::baseline_waveform(16);
        const ActiveSet a = default_active_set(w);
        const EffectiveChannel h = effective_channel_ideal(single(1.0, 0.0, 0.0), w, a);
        const auto mask = a.mask(16);
        for (int p = 0; p < 16; ++p)
            for (int q = 0; q < 16; ++q) CHECK(std::abs(h.h(p, q) - ((p == q && mask[q]) ? 1.0 : 0.0)) < 1e-12);
        CHECK(static_cast<int>(h.inputs.size()) == a.n_u);
        CHECK(h.submatrix().rows() == a.n_u);
    }

    SUBCASE("one bin of Doppler shifts by one carrier in the OFDM limit") {
        const WaveformConfig w = ofdm16();
        const ActiveSet a = default_active_set(w);
        const EffectiveChannel h = effective_channel_ideal(single(1.0, 0.0, w.delta_f), w, a);
        for (int q : a.unsigned_indices(16)) {
            const int p = (q + 1) % 16;
            if (!a.contains_signed(signed_index(p, 16))) continue;
            CHECK(std::abs(h.h(p, q)) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(h.h.col(q).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("phase noise and CFO channel") {
    const WaveformConfig w = test::baseline_waveform(16);
    const ActiveSet a = default_active_set(w);
    const DsChannel ch = sample_realization(5, TdlProfile{3, 3 * w.t_s, 6.0}, 300.0, 5.8e9);
    const EffectiveChannel h0 = effective_channel_ideal(ch, w, a);

    CHECK((effective_channel_pn_cfo(ch, w, a, {}).h - h0.h).cwiseAbs().maxCoeff() < 1e-14);
    const EffectiveChannel hp = effective_channel_pn_cfo(ch, w, a, {kPi / 4, 0.0, 0.0});
    CHECK((hp.h - std::exp(Complex(0, kPi / 4)) * h0.h).cwiseAbs().maxCoeff() < 1e-13);

    SUBCASE("a CFO of one bin acts like one bin of Doppler") {
        const WaveformConfig o = ofdm16();
        const ActiveSet ao = default_active_set(o);
        const DsChannel st = single(1.0, 0.0, 0.0);
        const CMatrix hc = effective_channel_pn_cfo(st, o, ao, {0.0, 0.0, o.delta_f}).h;
        const CMatrix hd = effective_channel_ideal(single(1.0, 0.0, o.delta_f), o, ao).h;
        CHECK((hc - hd).cwiseAbs().maxCoeff() < 1e-12);
        // and a phase ramp of 2 pi delta_f rad/s is the same offset
        const CMatrix hr = effective_channel_pn_cfo(st, o, ao, {0.0, 2 * kPi * o.delta_f, 0.0}).h;
        CHECK((hr - hc).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("ramp and CFO also agree with chirps and delays") {
        const CMatrix hc = effective_channel_pn_cfo(ch, w, a, {0.0, 0.0, 0.3 * w.delta_f}).h;
        const CMatrix hr = effective_channel_pn_cfo(ch, w, a, {0.0, 2 * kPi * 0.3 * w.delta_f, 0.0}).h;
        CHECK((hr - hc).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("sampling jitter channel") {
    const WaveformConfig w = test::baseline_waveform(16);
    const ActiveSet a = default_active_set(w);
    const DsChannel ch = sample_realization(6, TdlProfile{3, 3 * w.t_s, 6.0}, 300.0, 5.8e9);
    CHECK((effective_channel_sj(ch, w, a, {}).h - effective_channel_ideal(ch, w, a).h).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(effective_channel_sj(ch, w, a, {0.0, 1.5}), ConfigError);

    SUBCASE("timing offset on a static path is a pure phase") {
        const double tau = 2 * w.t_s;
        const double d0 = 0.05 * w.t_s;
        const DsChannel st = single(Complex(0.3, 0.4), tau, 0.0);
        const CMatrix hs = effective_channel_sj(st, w, a, {d0, 0.0}).h;
        const CMatrix hi = effective_channel_ideal(st, w, a).h;
        const Complex ph = std::exp(Complex(0, -4 * kPi * w.lambda1_bar() * tau * d0));
        CHECK((hs - ph * hi).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("skew scales the Doppler argument") {
        const double nu = 0.37 * w.delta_f;
        const double d1 = 0.01;
        const DsChannel st = single(1.0, 0.0, nu);
        const CMatrix hs = effective_channel_sj(st, w, a, {0.0, d1}).h;
        const double theta = nu / w.delta_f * (1 + d1) / 16;
        CMatrix m = CMatrix::Zero(16, 16);
        for (int q : a.unsigned_indices(16)) {
            for (int p : a.unsigned_indices(16)) {
                const double sp = std::sqrt(w.t_s);
                m(p, q) = std::exp(Complex(0, 2 * kPi * 0.007 * (double(q) * q - double(p) * p))) *
                          dirichlet_direct(16, (p - q) / 16.0 - theta) *
                          pulse_spectrum(w.pulse, w.t_s, signed_index(q, 16) * w.delta_f) / sp;
            }
        }
        Eigen::Index r, c;
        m.cwiseAbs().maxCoeff(&r, &c);
        const Complex g = hs(r, c) / m(r, c);
        CHECK(std::abs(std::abs(g) - 1.0) < 1e-12);
        CHECK((hs - g * m).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("sample-spaced reference channel") {
    const WaveformConfig w = test::baseline_waveform(16);
    const ActiveSet a = default_active_set(w);
    const EffectiveChannel id = dt_reference_channel(single(1.0, 0.0, 0.0), w);
    CHECK((id.h - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(id.inputs.size() == 16);

    SUBCASE("integer delays agree with the pulse-shaped model on active carriers") {
        const DsChannel ch({{Complex(0.8, 0.1), 0.0, 0.0}, {Complex(-0.2, 0.5), 3 * w.t_s, 0.0}});
        const CMatrix hd = dt_reference_channel(ch, w, a).h;
        const CMatrix hc = effective_channel_ideal(ch, w, a).h;
        double e = 0.0;
        for (int p : a.unsigned_indices(16))
            for (int q : a.unsigned_indices(16)) e = std::max(e, std::abs(hd(p, q) - hc(p, q)));
        CHECK(e < 1e-10);
    }

    SUBCASE("fractional delay is rounded away") {
        const DsChannel ch({{Complex(0.8, 0.1), 0.0, 0.0}, {Complex(-0.2, 0.5), 1.1 * w.t_s, 0.0}});
        CMatrix hd = dt_reference_channel(ch, w, a).h;
        const CMatrix hc = effective_channel_ideal(ch, w, a).h;
        for (int q = 0; q < 16; ++q)
            if (!a.contains_signed(signed_index(q, 16))) hd.row(q).setZero();
        CHECK((hd - hc).norm() > 1e-2);
    }

    CHECK_THROWS_AS(dt_reference_channel(single(1.0, 5 * w.t_s, 0.0), w), ConfigError);
}

TEST_CASE("impulse response") {
    EffectiveChannel eye{CMatrix::Identity(16, 16), ChannelVariant::Ideal, {}, {}};
    const CVector h = impulse_response(eye);
    CHECK(std::abs(h[8] - 1.0) < 1e-15);
    CHECK(h.norm() == doctest::Approx(1.0));

    const WaveformConfig w = test::baseline_waveform(64, 8);
    SUBCASE("OFDM paths are not separable") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const ImpulseResponses ir = impulse_responses(w, ir_channel(w, {1.1, 3, 6}, 12e3, seed));
            CHECK(count_clusters(ir.ct_ofdm, 0.25) < 3);
        }
    }
}

TEST_CASE("AFDM impulse response resolves three clusters for the default draw" * doctest::may_fail()) {
    const WaveformConfig w = test::baseline_waveform(64, 8);
    const ImpulseResponses ir = impulse_responses(w, ir_channel(w, {1.1, 3, 6}, 12e3, 1));
    CHECK(count_clusters(ir.ct_afdm, 0.25) >= 3);
}

TEST_CASE("cluster counting") {
    CVector h = CVector::Constant(32, 0.01);
    h[3] = 1.0;
    h[10] = 0.5;
    h[11] = 0.4;
    h[20] = 0.2;
    CHECK(count_clusters(h, 0.25) == 2);
    CHECK(count_clusters(h, 0.1) == 3);
    CHECK(nrms_dominant(h, h, 0.5) == 0.0);
    CVector g = h;
    g[3] = 0.9;
    CHECK(nrms_dominant(h, g, 0.5) == doctest::Approx(0.1 / std::sqrt(1.25)));
}

TEST_CASE("channel realizations") {
    const TdlProfile prof;
    CHECK(max_doppler_hz(250, 5.8e9) == doctest::Approx(250 / 3.6 * 5.8e9 / 299792458.0));
    CHECK(max_doppler_hz(250, 5.8e9) == doctest::Approx(1343).epsilon(1e-3));
    const DsChannel a = sample_realization(9, prof, 250, 5.8e9);
    const DsChannel b = sample_realization(9, prof, 250, 5.8e9);
    CHECK(a.size() == 3);
    CHECK(a.total_power() == doctest::Approx(1.0));
    CHECK(a.paths().front().delay == 0.0);
    for (size_t l = 0; l < a.size(); ++l) {
        CHECK(a.paths()[l].gain == b.paths()[l].gain);
        CHECK(a.paths()[l].delay == b.paths()[l].delay);
        CHECK(std::abs(a.paths()[l].doppler) <= max_doppler_hz(250, 5.8e9));
        CHECK(a.paths()[l].delay <= prof.delay_spread);
    }
    for (const auto& p : sample_realization(9, prof, 0.0, 5.8e9).paths()) CHECK(p.doppler == 0.0);

    const DsChannel back = channel_from_csv(channel_to_csv(a));
    for (size_t l = 0; l < a.size(); ++l) {
        CHECK(back.paths()[l].gain == a.paths()[l].gain);
        CHECK(back.paths()[l].delay == a.paths()[l].delay);
        CHECK(back.paths()[l].doppler == a.paths()[l].doppler);
    }
    CHECK(channel_to_csv(a).rfind("l,gain_re,gain_im,delay_s,doppler_hz\n", 0) == 0);
    CHECK_THROWS_AS(channel_from_csv("l,gain_re\n0,1\n"), ConfigError);
}
