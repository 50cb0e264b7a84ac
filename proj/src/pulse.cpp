// SPDX-License-Identifier: Apache-2.0
#include "afdm/pulse.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace afdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-x) below 1e-16 relative to the peak
constexpr double kGaussianCut = 36.85;

double rrc_time(double alpha, double t_s, double t) {
    const double x = t / t_s;
    const double norm = 1.0 / std::sqrt(t_s);
    if (std::abs(x) < 1e-10) return norm * (1.0 - alpha + 4.0 * alpha / kPi);
    const double edge = 1.0 / (4.0 * alpha);
    if (std::abs(std::abs(x) - edge) < 1e-10) {
        const double a = kPi / (4.0 * alpha);
        return norm * alpha / std::sqrt(2.0) *
               ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * x * (1.0 - alpha)) +
                       4.0 * alpha * x * std::cos(kPi * x * (1.0 + alpha));
    const double den = kPi * x * (1.0 - 16.0 * alpha * alpha * x * x);
    return norm * num / den;
}

double rrc_spectrum(double alpha, double t_s, double f) {
    const double af = std::abs(f);
    const double lo = (1.0 - alpha) / (2.0 * t_s);
    const double hi = (1.0 + alpha) / (2.0 * t_s);
    if (af <= lo) return std::sqrt(t_s);
    if (af > hi) return 0.0;
    return std::sqrt(t_s) * std::cos(kPi * t_s / (2.0 * alpha) * (af - lo));
}

double gaussian_time(double b3, double t_s, double t) {
    return std::sqrt(t_s) * std::sqrt(2.0 * kPi / std::log(2.0)) * b3 *
           std::exp(-2.0 * kPi * kPi * b3 * b3 * t * t / std::log(2.0));
}

double gaussian_spectrum(double b3, double t_s, double f) {
    return std::sqrt(t_s) * std::exp(-0.5 * std::log(2.0) * (f / b3) * (f / b3));
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

double untruncated_time(const PulseShape& p, double t_s, double t) {
    switch (p.kind) {
        case PulseKind::Rrc: return rrc_time(p.param, t_s, t);
        case PulseKind::Gaussian: return gaussian_time(p.param, t_s, t);
        case PulseKind::Rect: {
            const double half = 0.5 * p.param;
            if (std::abs(t) < half) return std::sqrt(t_s) / p.param;
            // half amplitude at the edges keeps trapezoid sums consistent with sinc
            if (std::abs(std::abs(t) - half) <= 1e-12 * p.param) return 0.5 * std::sqrt(t_s) / p.param;
            return 0.0;
        }
    }
    return 0.0;
}

double untruncated_half_support(const PulseShape& p) {
    switch (p.kind) {
        case PulseKind::Rrc: return kInf;
        case PulseKind::Gaussian:
            return std::sqrt(kGaussianCut * std::log(2.0) / (2.0 * kPi * kPi)) / p.param;
        case PulseKind::Rect: return 0.5 * p.param;
    }
    return kInf;
}

// Composite Simpson on [0, h] of p(t) cos(2 pi f t), doubled (p is even).
double truncated_spectrum(const PulseShape& p, double t_s, double f) {
    const double half = pulse_half_support(p, t_s);
    const int per_ts = 128;
    int steps = static_cast<int>(std::ceil(half / t_s * per_ts));
    if (steps % 2) ++steps;
    const double h = half / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = i * h;
        double v = untruncated_time(p, t_s, t) * std::cos(2.0 * kPi * f * t);
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * v;
    }
    return 2.0 * acc * h / 3.0;
}

}  // namespace

PulseShape PulseShape::rrc(double alpha, std::optional<int> lp) {
    PulseShape p{PulseKind::Rrc, alpha, lp};
    p.validate();
    return p;
}

PulseShape PulseShape::gaussian(double bw, std::optional<int> lp) {
    PulseShape p{PulseKind::Gaussian, bw, lp};
    p.validate();
    return p;
}

PulseShape PulseShape::rect(double duration, std::optional<int> lp) {
    PulseShape p{PulseKind::Rect, duration, lp};
    p.validate();
    return p;
}

void PulseShape::validate() const {
    if (kind == PulseKind::Rrc && !(param > 0.0 && param <= 1.0)) {
        throw ConfigError("pulse.rolloff must lie in (0, 1]");
    }
    if (kind == PulseKind::Gaussian && !(param > 0.0)) {
        throw ConfigError("pulse.bandwidth must be positive");
    }
    if (kind == PulseKind::Rect && !(param > 0.0)) {
        throw ConfigError("pulse.duration must be positive");
    }
    if (truncation && (*truncation <= 0 || *truncation % 2 == 0)) {
        throw ConfigError("pulse.truncation must be a positive odd integer");
    }
}

std::string PulseShape::describe() const {
    std::ostringstream os;
    switch (kind) {
        case PulseKind::Rrc: os << "rrc(alpha=" << param << ")"; break;
        case PulseKind::Gaussian: os << "gaussian(b3db=" << param << ")"; break;
        case PulseKind::Rect: os << "rect(d=" << param << ")"; break;
    }
    if (truncation) os << "/Lp=" << *truncation;
    return os.str();
}

double pulse_half_support(const PulseShape& pulse, double t_s) {
    double h = untruncated_half_support(pulse);
    if (pulse.truncation) h = std::min(h, 0.5 * *pulse.truncation * t_s);
    return h;
}

double pulse_band_edge(const PulseShape& pulse, double t_s) {
    if (pulse.kind == PulseKind::Rrc && !pulse.truncation) return (1.0 + pulse.param) / (2.0 * t_s);
    return kInf;
}

double pulse_time(const PulseShape& pulse, double t_s, double t) {
    if (pulse.truncation && std::abs(t) > 0.5 * *pulse.truncation * t_s) return 0.0;
    return untruncated_time(pulse, t_s, t);
}

Complex pulse_spectrum(const PulseShape& pulse, double t_s, double f) {
    if (pulse.truncation) return truncated_spectrum(pulse, t_s, f);
    switch (pulse.kind) {
        case PulseKind::Rrc: return rrc_spectrum(pulse.param, t_s, f);
        case PulseKind::Gaussian: return gaussian_spectrum(pulse.param, t_s, f);
        case PulseKind::Rect: return std::sqrt(t_s) * sinc(f * pulse.param);
    }
    return 0.0;
}

double periodized_pulse(const PulseShape& pulse, double t_s, double period, double t) {
    const double half = pulse_half_support(pulse, t_s);
    if (std::isinf(half)) {
        // bandlimited: Poisson sum is a finite Fourier series
        const double edge = pulse_band_edge(pulse, t_s);
        const long imax = static_cast<long>(std::floor(edge * period));
        double acc = 0.0;
        for (long i = -imax; i <= imax; ++i) {
            acc += pulse_spectrum(pulse, t_s, i / period).real() *
                   std::cos(2.0 * kPi * i * t / period);
        }
        return acc / period;
    }
    const long lmin = static_cast<long>(std::ceil((t - half) / period));
    const long lmax = static_cast<long>(std::floor((t + half) / period));
    double acc = 0.0;
    for (long l = lmin; l <= lmax; ++l) acc += pulse_time(pulse, t_s, t - l * period);
    return acc;
}

}  // namespace afdm
