// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/random.hpp"
#include "afdm/waveform.hpp"

#include <random>

namespace afdm::test {

inline CVector random_qpsk(int n, std::uint64_t seed) {
    Rng rng(seed);
    CVector c(n);
    const double a = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) c[i] = Complex((rng() & 1u) ? a : -a, (rng() & 2u) ? a : -a);
    return c;
}

inline CVector random_gaussian(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CVector c(n);
    for (int i = 0; i < n; ++i) c[i] = Complex(g(rng), g(rng));
    return c;
}

// Zero outside the active set.
inline CVector on_active(const CVector& c, const ActiveSet& active) {
    CVector out = CVector::Zero(c.size());
    for (int q : active.unsigned_indices(static_cast<int>(c.size()))) out[q] = c[q];
    return out;
}

inline double max_abs(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline WaveformConfig baseline_waveform(int n = 64, int n_cpp = 4, PulseShape pulse = PulseShape::rrc(0.25)) {
    return WaveformConfig::make(DaftParams(n, 0.007, 0.007), 15e3, n_cpp, 10, pulse);
}

}  // namespace afdm::test
