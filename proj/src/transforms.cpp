// SPDX-License-Identifier: Apache-2.0
#include "afdm/transforms.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

namespace afdm {

void fft_inplace(CVector& v, bool inverse) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<Complex> in(v.data(), v.data() + v.size());
    std::vector<Complex> out;
    if (inverse) {
        fft.inv(out, in);
    } else {
        fft.fwd(out, in);
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = out[static_cast<size_t>(i)];
}

DaftParams::DaftParams(int n_, double l1, double l2) : n(n_), lambda1(l1), lambda2(l2) {
    validate();
}

void DaftParams::validate() const {
    if (n < 2 || n % 2 != 0) {
        throw ConfigError("daft.n must be an even integer >= 2, got " + std::to_string(n));
    }
    if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) {
        throw ConfigError("daft.lambda1/lambda2 must be finite");
    }
}

double canonical_lambda1(int n, int a) {
    if (n <= 0) throw ConfigError("canonical_lambda1: n must be positive");
    return static_cast<double>(a) / (2.0 * n);
}

ChirpFrame::ChirpFrame(CVector s, DaftParams p) : samples(std::move(s)), params(p) {
    params.validate();
    if (samples.size() != params.n) {
        throw ConfigError("ChirpFrame: length " + std::to_string(samples.size()) +
                          " does not match n = " + std::to_string(params.n));
    }
}

namespace {

// exp(-j2pi lambda n^2)
Complex chirp_factor(double lambda, long n) {
    return cexpj(-lambda * static_cast<double>(n) * static_cast<double>(n));
}

void check_length(const CVector& v, const DaftParams& p, const char* what) {
    if (v.size() != p.n) {
        throw ConfigError(std::string(what) + ": vector length " + std::to_string(v.size()) +
                          " does not match n = " + std::to_string(p.n));
    }
}

}  // namespace

CMatrix build_daft_matrix(const DaftParams& params) {
    params.validate();
    const int n = params.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix a(n, n);
    for (int p = 0; p < n; ++p) {
        const Complex lp = chirp_factor(params.lambda2, p);
        for (int q = 0; q < n; ++q) {
            const long pq = (static_cast<long>(p) * q) % n;
            a(p, q) = lp * cexpj(-static_cast<double>(pq) / n) * scale *
                      chirp_factor(params.lambda1, q);
        }
    }
    return a;
}

CVector daft(const CVector& r, const DaftParams& params) {
    params.validate();
    check_length(r, params, "daft");
    const int n = params.n;
    CVector v(n);
    for (int k = 0; k < n; ++k) v[k] = r[k] * chirp_factor(params.lambda1, k);
    fft_inplace(v, false);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) v[m] *= scale * chirp_factor(params.lambda2, m);
    return v;
}

CVector idaft(const CVector& c, const DaftParams& params) {
    params.validate();
    check_length(c, params, "idaft");
    const int n = params.n;
    CVector v(n);
    for (int m = 0; m < n; ++m) v[m] = c[m] * std::conj(chirp_factor(params.lambda2, m));
    fft_inplace(v, true);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) v[k] *= scale * std::conj(chirp_factor(params.lambda1, k));
    return v;
}

CVector idaft(const ChirpFrame& c) { return idaft(c.samples, c.params); }

Complex chirp_extend(const CVector& x, const DaftParams& params, long k) {
    check_length(x, params, "chirp_extend");
    const long n = params.n;
    const long idx = floor_mod(k, n);
    if (idx == k) return x[idx];
    const long l = (k - idx) / n;
    // l^2 N^2 + 2 idx l N, exact in 64-bit for any practical k
    const long long poly = static_cast<long long>(l) * l * n * n + 2LL * idx * l * n;
    return x[idx] * cexpj(params.lambda1 * static_cast<double>(poly));
}

Complex symbol_extend(const CVector& c, const DaftParams& params, long m) {
    check_length(c, params, "symbol_extend");
    const long n = params.n;
    const long idx = floor_mod(m, n);
    if (idx == m) return c[idx];
    const long l = (m - idx) / n;
    const long long poly = static_cast<long long>(l) * l * n * n + 2LL * idx * l * n;
    return c[idx] * cexpj(-params.lambda2 * static_cast<double>(poly));
}

Complex afs_coefficient_numeric(const SampledSignal& signal, long m, double chirp_rate,
                                double period) {
    if (!(period > 0.0) || !(signal.dt > 0.0)) {
        throw ConfigError("afs_coefficient_numeric: period and dt must be positive");
    }
    const double tol = 1e-9 * signal.dt + 1e-12 * period;
    const double i0_real = (0.0 - signal.t0) / signal.dt;
    const double i1_real = (period - signal.t0) / signal.dt;
    const long i0 = std::lround(i0_real);
    const long i1 = std::lround(i1_real);
    if (std::abs(i0_real - i0) * signal.dt > tol || std::abs(i1_real - i1) * signal.dt > tol ||
        i0 < 0 || i1 >= signal.size() || i1 <= i0) {
        throw ConfigError("afs_coefficient_numeric: sampling grid does not cover [0, T]");
    }
    Complex acc = 0.0;
    for (long i = i0; i <= i1; ++i) {
        const double t = static_cast<double>(i - i0) * signal.dt;
        const double w = (i == i0 || i == i1) ? 0.5 : 1.0;
        acc += w * signal.samples[i] *
               cexpj(-(chirp_rate * t * t + static_cast<double>(m) * t / period));
    }
    return acc * signal.dt / period;
}

Complex aft_numeric(const SampledSignal& signal, double chirp_rate, double f) {
    const Eigen::Index len = signal.size();
    if (len == 0) return 0.0;
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) {
        const double t = signal.time(i);
        const double w = (len > 1 && (i == 0 || i == len - 1)) ? 0.5 : 1.0;
        acc += w * signal.samples[i] * cexpj(-(chirp_rate * t * t + f * t));
    }
    return acc * signal.dt;
}

}  // namespace afdm
