// SPDX-License-Identifier: Apache-2.0
#include "afdm/receiver.hpp"

#include "afdm/random.hpp"

#include <algorithm>
#include <cmath>

namespace afdm {

RxConfig RxConfig::make(const WaveformConfig& waveform, double noise_var) {
    RxConfig rx;
    rx.waveform = waveform;
    rx.rx_bandwidth = sweep_bandwidth(waveform);
    rx.noise_var = noise_var;
    rx.validate();
    return rx;
}

double RxConfig::nominal_bandwidth(const WaveformConfig& w) {
    const double alpha = w.pulse.is_rrc() ? w.pulse.param : 1.0;
    return std::ceil(2.0 * w.n() * (1.0 + alpha) - 1e-9) * w.delta_f;
}

double RxConfig::sweep_bandwidth(const WaveformConfig& w) {
    const double n = w.n();
    const double alpha = w.pulse.is_rrc() ? w.pulse.param : 1.0;
    const double half_bins = 2.0 * std::abs(w.daft.lambda1) * n * (n + w.n_cpp) + n * (1.0 + alpha) / 2.0;
    return 2.0 * (std::ceil(half_bins) + 2.0) * w.delta_f;
}

void RxConfig::validate() const {
    waveform.validate();
    if (!(rx_bandwidth > 0.0)) throw ConfigError("rx.bandwidth must be positive");
    if (!(noise_var >= 0.0)) throw ConfigError("rx.noise_var must be >= 0");
}

CVector ct_pipeline(const SampledSignal& frame, const DsChannel& channel, const RxConfig& rx,
                    const PipelineImpairments& imp, std::optional<std::uint64_t> noise_seed) {
    rx.validate();
    imp.sj.validate();
    const WaveformConfig& w = rx.waveform;
    const int n = w.n();
    const double t_s = w.t_s;
    const double dt = w.sample_step();
    if (frame.size() != w.frame_samples() || std::abs(frame.dt - dt) > 1e-9 * dt ||
        std::abs(frame.t0 - w.frame_start()) > 1e-6 * dt) {
        throw ConfigError("ct_pipeline: frame grid does not match the waveform oversampling");
    }
    if (channel.max_delay() > w.n_cpp * t_s * (1.0 + 1e-12)) {
        throw ConfigError("ct_pipeline: channel delay exceeds N_cpp * T_s");
    }
    const double l1bar = w.lambda1_bar();

    // Fourier lines of the dechirped main period (period T, spacing delta_f).
    const long nc = w.oversample;
    const long len = n * nc;
    CVector v(len);
    for (long j = 0; j < len; ++j) {
        const double t = j * dt;
        v[j] = frame.samples[w.n_cpp * nc + j] * cexpj(-l1bar * t * t);
    }
    fft_inplace(v, false);
    v /= static_cast<double>(len);
    double vmax = 0.0;
    for (long k = 0; k < len; ++k) vmax = std::max(vmax, std::abs(v[k]));
    std::vector<std::pair<double, Complex>> lines;
    for (long k = 0; k < len; ++k) {
        if (std::abs(v[k]) > 1e-15 * vmax) lines.emplace_back(signed_index(k, len) * w.delta_f, v[k]);
    }

    const double tau_max = channel.max_delay();
    const double extra_f = imp.pn_cfo.cfo + imp.pn_cfo.phi1 / (2.0 * kPi);
    const double half_b = 0.5 * rx.rx_bandwidth;
    const double gain_u = std::sqrt(t_s);
    CVector r = CVector::Zero(n);
    for (int s = 0; s < n; ++s) {
        const double rel = imp.sj.delta0 + s * t_s * (1.0 + imp.sj.delta1);
        const double t = tau_max + rel;
        Complex acc = 0.0;
        for (const auto& path : channel.paths()) {
            const double tp = t - path.delay;
            Complex acc_path = 0.0;
            for (const auto& [f, coef] : lines) {
                const double fl = f + path.doppler + extra_f;
                if (std::abs(2.0 * l1bar * tp + fl) > half_b) continue;
                acc_path += coef * cexpj(f * tp);
            }
            acc += path.gain * cexpj(path.doppler * tp) * cexpj(l1bar * tp * tp) * acc_path;
        }
        r[s] = gain_u * acc * std::polar(1.0, imp.pn_cfo.phi0) * cexpj(extra_f * rel);
    }
    CVector y = daft(r, w.daft);
    if (noise_seed && rx.noise_var > 0.0) {
        Rng rng(*noise_seed);
        std::normal_distribution<double> g(0.0, std::sqrt(rx.noise_var / 2.0));
        for (int i = 0; i < n; ++i) y[i] += Complex(g(rng), g(rng));
    }
    return y;
}

Complex pulse_aft(const PulseShape& pulse, double t_s, double chirp_rate, double f) {
    double half = pulse_half_support(pulse, t_s);
    if (std::isinf(half)) half = 64.0 * t_s;
    const int per_ts = 64;
    int steps = static_cast<int>(std::ceil(2.0 * half / t_s * per_ts));
    if (steps % 2) ++steps;
    const double h = 2.0 * half / steps;
    Complex acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double s = -half + i * h;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * pulse_time(pulse, t_s, s) * cexpj(-(chirp_rate * s * s + f * s));
    }
    return acc * h / 3.0;
}

Complex chirp_filter_response(const PulseShape& pulse, const WaveformConfig& config, long m, double t) {
    const double l1bar = config.lambda1_bar();
    const double fm = 2.0 * l1bar * t + m / config.period();
    const Complex u = cexpj(l1bar * t * t + m * t / config.period());
    return u * std::conj(pulse_aft(pulse, config.t_s, l1bar, fm));
}

CMatrix lmmse_matrix(const CMatrix& h, double noise_var) {
    if (!(noise_var >= 0.0)) throw ConfigError("lmmse_matrix: noise_var must be >= 0");
    CMatrix g;
    if (noise_var == 0.0) {
        g = h.completeOrthogonalDecomposition().pseudoInverse();
    } else {
        CMatrix gram = h.adjoint() * h;
        gram.diagonal().array() += noise_var;
        Eigen::LLT<CMatrix> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericalError("lmmse_matrix: Cholesky factorization failed");
        g = llt.solve(h.adjoint());
    }
    if (!g.allFinite()) throw NumericalError("lmmse_matrix: non-finite equalizer entries");
    return g;
}

CMatrix lmmse_matrix(const EffectiveChannel& h, double noise_var) {
    return lmmse_matrix(h.submatrix(), noise_var);
}

RVector sinr_per_symbol(const CMatrix& h, double noise_var) {
    const CMatrix gbar = lmmse_matrix(h, noise_var) * h;
    RVector out(gbar.cols());
    for (Eigen::Index i = 0; i < gbar.cols(); ++i) {
        const double g = gbar(i, i).real();
        if (g <= -1e-9 || g >= 1.0 + 1e-9 || std::abs(gbar(i, i).imag()) > 1e-6) {
            throw NumericalError("sinr_per_symbol: diagonal of G*H outside (0,1) at index " +
                                 std::to_string(i));
        }
        const double gc = std::clamp(g, 0.0, 1.0);
        out[i] = gc >= 1.0 ? std::numeric_limits<double>::infinity() : gc / (1.0 - gc);
    }
    return out;
}

RVector sinr_per_symbol(const EffectiveChannel& h, double noise_var) {
    return sinr_per_symbol(h.submatrix(), noise_var);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

bool square_qam(int m) {
    if (m < 4) return false;
    int bits = 0;
    while ((1 << bits) < m) ++bits;
    return (1 << bits) == m && bits % 2 == 0;
}

}  // namespace

double theoretical_ber(const RVector& sinr, int m_c) {
    if (!square_qam(m_c)) throw ConfigError("theoretical_ber: constellation size must be a square QAM order");
    if (sinr.size() == 0) throw ConfigError("theoretical_ber: empty SINR vector");
    const double mc = m_c;
    const double pre = 4.0 / std::log2(mc) * (1.0 - 1.0 / std::sqrt(mc));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sinr.size(); ++i) acc += q_function(std::sqrt(3.0 * sinr[i] / (mc - 1.0)));
    return std::clamp(pre * acc / static_cast<double>(sinr.size()), 0.0, 0.5);
}

QamMapper::QamMapper(int m_c) : m_(m_c) {
    if (!square_qam(m_c)) throw ConfigError("QAM order must be 4, 16, 64, 256, ...");
    bits_ = 0;
    while ((1 << bits_) < m_c) ++bits_;
    side_ = 1 << (bits_ / 2);
    scale_ = 1.0 / std::sqrt(2.0 * (m_c - 1) / 3.0);
}

double QamMapper::level(int gray_bits) const {
    int i = gray_bits;
    for (int s = 1; s < 32; s <<= 1) i ^= i >> s;  // inverse Gray
    return (side_ - 1 - 2 * i) * scale_;
}

int QamMapper::slice(double v) const {
    int i = static_cast<int>(std::lround((side_ - 1 - v / scale_) / 2.0));
    i = std::clamp(i, 0, side_ - 1);
    return i ^ (i >> 1);
}

Complex QamMapper::point(int index) const {
    const int half = bits_ / 2;
    return {level(index >> half), level(index & ((1 << half) - 1))};
}

CVector QamMapper::map(const std::vector<std::uint8_t>& bits) const {
    if (bits.size() % static_cast<size_t>(bits_) != 0) {
        throw ConfigError("qam_map: bit count not divisible by log2(M)");
    }
    CVector out(static_cast<Eigen::Index>(bits.size() / bits_));
    for (Eigen::Index s = 0; s < out.size(); ++s) {
        int idx = 0;
        for (int b = 0; b < bits_; ++b) idx = (idx << 1) | (bits[size_t(s) * bits_ + b] & 1);
        out[s] = point(idx);
    }
    return out;
}

std::vector<std::uint8_t> QamMapper::demap(const CVector& symbols) const {
    const int half = bits_ / 2;
    std::vector<std::uint8_t> out(static_cast<size_t>(symbols.size()) * bits_);
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        const int idx = (slice(symbols[s].real()) << half) | slice(symbols[s].imag());
        for (int b = 0; b < bits_; ++b) out[size_t(s) * bits_ + b] = (idx >> (bits_ - 1 - b)) & 1;
    }
    return out;
}

CVector qam_map(const std::vector<std::uint8_t>& bits, int m_c) { return QamMapper(m_c).map(bits); }

std::vector<std::uint8_t> qam_demap(const CVector& symbols, int m_c) { return QamMapper(m_c).demap(symbols); }

DetectionReport detect(const EffectiveChannel& h, const CVector& y, double noise_var, int m_c) {
    const CMatrix hs = h.submatrix();
    const CMatrix g = lmmse_matrix(hs, noise_var);
    CVector ys(static_cast<Eigen::Index>(h.outputs.size()));
    for (size_t i = 0; i < h.outputs.size(); ++i) ys[Eigen::Index(i)] = y[h.outputs[i]];
    const CVector est = g * ys;
    const CMatrix gbar = g * hs;
    DetectionReport rep;
    rep.sinr = sinr_per_symbol(hs, noise_var);
    rep.ber_theory = theoretical_ber(rep.sinr, m_c);
    rep.symbol_estimates = CVector::Zero(h.h.cols());
    for (size_t i = 0; i < h.inputs.size(); ++i) {
        const Eigen::Index ii(i);
        rep.symbol_estimates[h.inputs[i]] = est[ii] / gbar(ii, ii).real();
    }
    return rep;
}

}  // namespace afdm
