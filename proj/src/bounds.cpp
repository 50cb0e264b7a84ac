// SPDX-License-Identifier: Apache-2.0
#include "afdm/bounds.hpp"

#include "afdm/channel.hpp"

#include <cmath>
#include <vector>

namespace afdm {

void CrbConfig::validate() const {
    daft.validate();
    if (n_u < 1 || n_u > daft.n) throw ConfigError("crb: n_u must lie in [1, N]");
    if (!(sigma_c2 > 0.0)) throw ConfigError("crb: sigma_c2 must be positive");
    if (!(snr > 0.0) || !std::isfinite(snr)) throw ConfigError("crb: snr must be positive");
    if (!std::isfinite(f_tau) || !std::isfinite(f_nu)) throw ConfigError("crb: f_tau/f_nu must be finite");
}

namespace {

struct Derivs {
    CMatrix h, d_tau, d_nu;
};

// Active carriers as signed indices, centered.
std::vector<long> centered_set(int n, int n_u) {
    std::vector<long> out;
    const long lo = -(n_u / 2);
    for (long m = lo; m < lo + n_u; ++m) out.push_back(m);
    (void)n;
    return out;
}

// Route (b): the generic effective-channel builder with a unit-gain single path.
CMatrix single_path_matrix(const CrbConfig& cfg, double f_tau, double f_nu) {
    const int n = cfg.daft.n;
    // flat-top pulse so that the pulse factor is exactly 1 on every centered carrier
    const WaveformConfig w = WaveformConfig::make(cfg.daft, 15e3, 0, 2, PulseShape::rrc(1e-3));
    ActiveSet active;
    for (long m : centered_set(n, cfg.n_u)) active.indices.push_back(int(m));
    active.n_u = cfg.n_u;
    const double theta = f_nu / n + 2.0 * cfg.daft.lambda1 * n * f_tau;
    return build_effective_channel({KernelPath{Complex(1.0), f_tau, theta}}, w, active,
                                   ChannelVariant::Ideal).h;
}

// sum_{k<N} r^k and sum_{k<N} k r^k
void geometric_sums(Complex r, int n, Complex& s, Complex& t) {
    const double gap = std::abs(1.0 - r);
    if (gap < 1e-8) {
        s = double(n);
        t = 0.5 * n * (n - 1.0);
        return;
    }
    if (gap < 1e-2) {
        s = 0.0;
        t = 0.0;
        Complex rk = 1.0;
        for (int k = 0; k < n; ++k) {
            s += rk;
            t += double(k) * rk;
            rk *= r;
        }
        return;
    }
    const Complex rn = std::pow(r, n);
    s = (1.0 - rn) / (1.0 - r);
    t = r * (1.0 - double(n) * std::pow(r, n - 1) + (n - 1.0) * rn) / ((1.0 - r) * (1.0 - r));
}

Derivs analytic_derivatives(const CrbConfig& cfg) {
    const int n = cfg.daft.n;
    const double l1 = cfg.daft.lambda1;
    const double theta = cfg.f_nu / n + 2.0 * l1 * n * cfg.f_tau;
    Derivs d{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    const auto set = centered_set(n, cfg.n_u);
    const Complex j2pi(0.0, 2.0 * kPi);
    for (long sq : set) {
        const long q = floor_mod(sq, n);
        for (long sp : set) {
            const long p = floor_mod(sp, n);
            const double quad = double(q) * q - double(p) * p;
            const Complex e = cexpj(cfg.daft.lambda2 * quad) * cexpj(sq * cfg.f_tau);
            Complex s, t;
            geometric_sums(cexpj(theta - double(p - q) / n), n, s, t);
            const Complex k = s / double(n);
            const Complex dk = j2pi / double(n) * t;  // d kernel / d theta
            d.h(p, q) = e * k;
            d.d_tau(p, q) = e * (j2pi * double(sq) * k + 2.0 * l1 * n * dk);
            d.d_nu(p, q) = e * dk / double(n);
        }
    }
    return d;
}

Eigen::Matrix2d fim_from(const CrbConfig& cfg, const CMatrix& dt, const CMatrix& dn) {
    const double scale = 2.0 * (double(cfg.n_u) / cfg.daft.n) * cfg.sigma_c2 * cfg.snr;
    auto tr = [](const CMatrix& a, const CMatrix& b) { return (a.array() * b.conjugate().array()).sum().real(); };
    Eigen::Matrix2d f;
    f(0, 0) = scale * tr(dt, dt);
    f(1, 1) = scale * tr(dn, dn);
    f(0, 1) = f(1, 0) = scale * tr(dt, dn);
    return f;
}

}  // namespace

FimResult fim_dual(const CrbConfig& cfg) {
    cfg.validate();
    const Derivs d = analytic_derivatives(cfg);
    const double h = 1e-6;
    const CMatrix fd_tau = (single_path_matrix(cfg, cfg.f_tau + h, cfg.f_nu) -
                            single_path_matrix(cfg, cfg.f_tau - h, cfg.f_nu)) / (2.0 * h);
    const CMatrix fd_nu = (single_path_matrix(cfg, cfg.f_tau, cfg.f_nu + h) -
                           single_path_matrix(cfg, cfg.f_tau, cfg.f_nu - h)) / (2.0 * h);
    FimResult out;
    out.analytic = fim_from(cfg, d.d_tau, d.d_nu);
    out.finite_difference = fim_from(cfg, fd_tau, fd_nu);
    const double ref = out.analytic.cwiseAbs().maxCoeff();
    out.max_rel_gap = (out.analytic - out.finite_difference).cwiseAbs().maxCoeff() / ref;
    return out;
}

Eigen::Matrix2d fim_numeric(const CrbConfig& cfg) {
    const FimResult r = fim_dual(cfg);
    if (!(r.max_rel_gap < 1e-6)) {
        throw NumericalError("fim_numeric: analytic and finite-difference FIM disagree (rel gap " +
                             std::to_string(r.max_rel_gap) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.analytic);
    if (es.eigenvalues().minCoeff() < -1e-9 * r.analytic.cwiseAbs().maxCoeff()) {
        throw NumericalError("fim_numeric: FIM is not positive semi-definite");
    }
    return r.analytic;
}

CrbPair crb_from_fim(const Eigen::Matrix2d& fim) {
    const double det = fim.determinant();
    if (!(std::abs(det) > 0.0)) throw NumericalError("crb_from_fim: singular FIM");
    const Eigen::Matrix2d inv = fim.inverse();
    return {inv(0, 0), inv(1, 1)};
}

double crb_validity_bound(int n, int n_u) {
    if (n <= 2) throw ConfigError("crb_validity_bound: n must be > 2");
    return std::sqrt(double(n_u)) / (std::sqrt(6.0) * (n - 2.0));
}

CrbPair crb_closed_afdm(const CrbConfig& cfg) {
    cfg.validate();
    const double l1 = cfg.daft.lambda1;
    if (l1 < 0.0 || l1 > crb_validity_bound(cfg.daft.n, cfg.n_u)) {
        throw ConfigError("crb_closed_afdm: lambda1 outside the validity range of the closed forms");
    }
    const double nu = cfg.n_u;
    const double den = nu / 3.0 - 2.0 * l1 * l1 * (cfg.daft.n - 2.0) * (cfg.daft.n - 2.0);
    if (!(den > 0.0)) throw ConfigError("crb_closed_afdm: non-positive denominator");
    const double base = cfg.sigma_c2 * cfg.snr * nu * den;
    return {1.0 / (2.0 * kPi * kPi * base), nu / (3.0 * kPi * kPi * base)};
}

CrbPair crb_closed_ofdm(const CrbConfig& cfg) {
    cfg.validate();
    const double nu = cfg.n_u;
    const double s = cfg.sigma_c2 * cfg.snr;
    return {3.0 / (2.0 * kPi * kPi * s * nu * nu), 1.0 / (2.0 * kPi * kPi * s * nu)};
}

}  // namespace afdm
