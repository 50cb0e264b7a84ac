// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/common.hpp"

#include <optional>
#include <string>

namespace afdm {

enum class PulseKind { Rrc, Gaussian, Rect };

struct PulseShape {
    PulseKind kind = PulseKind::Rrc;
    // Rrc: rolloff alpha. Gaussian: one-sided 3-dB bandwidth in Hz. Rect: duration in s.
    double param = 0.25;
    // Support limited to truncation * T_s seconds, centered. Must be odd.
    std::optional<int> truncation;

    static PulseShape rrc(double alpha, std::optional<int> lp = std::nullopt);
    static PulseShape gaussian(double bw_3db_hz, std::optional<int> lp = std::nullopt);
    static PulseShape rect(double duration_s, std::optional<int> lp = std::nullopt);

    void validate() const;
    bool is_rrc() const { return kind == PulseKind::Rrc; }
    bool flat_top() const { return kind == PulseKind::Rrc && !truncation; }
    std::string describe() const;
};

// Time response, real valued, normalized so that the spectrum peaks at sqrt(T_s).
double pulse_time(const PulseShape& pulse, double t_s, double t);

// P(f). Truncated pulses are transformed numerically from the windowed time response.
Complex pulse_spectrum(const PulseShape& pulse, double t_s, double f);

// Half width of the time support; +inf for the untruncated RRC.
double pulse_half_support(const PulseShape& pulse, double t_s);

// Strict band edge (Hz) beyond which P(f) = 0; +inf when not bandlimited.
double pulse_band_edge(const PulseShape& pulse, double t_s);

// sum_l p(t - l*period).
double periodized_pulse(const PulseShape& pulse, double t_s, double period, double t);

}  // namespace afdm
