// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace afdm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

// Invalid arguments or configuration (maps to CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure at run time (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// exp(j*2*pi*cycles); the integer part is dropped first so large arguments keep precision.
inline Complex cexpj(double cycles) {
    const double frac = cycles - std::round(cycles);
    return std::polar(1.0, 2.0 * kPi * frac);
}

inline long floor_mod(long k, long n) {
    const long r = k % n;
    return r < 0 ? r + n : r;
}

// Unsigned index q in [0,N) -> signed subcarrier in [-N/2, N/2).
inline long signed_index(long q, long n) { return q < n / 2 ? q : q - n; }

// Uniformly sampled complex waveform, sample i at t0 + i*dt.
struct SampledSignal {
    double t0 = 0.0;
    double dt = 1.0;
    CVector samples;

    double time(Eigen::Index i) const { return t0 + static_cast<double>(i) * dt; }
    Eigen::Index size() const { return samples.size(); }
};

// In-place unscaled FFT (sign -1 forward, +1 inverse). Sizes need not be powers of two.
void fft_inplace(CVector& v, bool inverse);

}  // namespace afdm
