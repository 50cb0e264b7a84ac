// SPDX-License-Identifier: Apache-2.0
#include "afdm/experiments.hpp"

#include "afdm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace afdm {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

std::string fmt_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class CsvSink {
public:
    CsvSink(const ExperimentConfig& cfg, RunResult& result) : cfg_(cfg), result_(result) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.out, ec);
        if (ec) throw ConfigError("config key 'out': cannot create directory '" + cfg.out + "'");
    }

    void write(const std::string& name, const std::vector<std::string>& notes, const std::string& columns,
               const std::vector<std::string>& rows) {
        const std::string path = (std::filesystem::path(cfg_.out) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("config key 'out': cannot write '" + path + "'");
        out << "# afdm-lab experiment=" << cfg_.experiment << " seed=" << cfg_.seed
            << " config_hash=" << hex64(cfg_.params.hash()) << "\n";
        for (const auto& n : notes) out << "# " << n << "\n";
        for (const auto& [k, v] : cfg_.params.resolved()) out << "# " << k << "=" << v << "\n";
        out << columns << "\n";
        for (const auto& r : rows) out << r << "\n";
        result_.files.push_back(path);
    }

private:
    const ExperimentConfig& cfg_;
    RunResult& result_;
};

std::vector<double> default_snr_grid() { return {0, 5, 10, 15, 20, 25, 30}; }

struct BerCommon {
    std::vector<double> snr_db;
    int m_c = 4;
    long bits_per_trial = 0;
    TdlProfile profile;
    double carrier_hz = 5.8e9;
    double v_kmh = 250.0;
};

BerCommon read_ber_common(const ConfigMap& p) {
    BerCommon c;
    c.snr_db = p.get_list("ber.snr_db", default_snr_grid());
    c.m_c = static_cast<int>(p.get_int("ber.constellation", 4));
    c.bits_per_trial = p.get_int("ber.bits_per_trial", 0);
    if (c.bits_per_trial < 0) throw ConfigError("config key 'ber.bits_per_trial' must be >= 0");
    c.profile.n_paths = static_cast<int>(p.get_int("channel.paths", 3));
    c.profile.delay_spread = p.get_double("channel.delay_spread_s", 0.5e-6);
    c.profile.pdp_decay_db = p.get_double("channel.pdp_decay_db", 10.0);
    c.carrier_hz = p.get_double("channel.carrier_hz", 5.8e9);
    c.v_kmh = p.get_double("channel.v_kmh", 250.0);
    if (c.profile.n_paths < 1) throw ConfigError("config key 'channel.paths' must be >= 1");
    if (!(c.profile.delay_spread >= 0.0)) throw ConfigError("config key 'channel.delay_spread_s' must be >= 0");
    if (!(c.carrier_hz > 0.0)) throw ConfigError("config key 'channel.carrier_hz' must be > 0");
    if (!(c.v_kmh >= 0.0)) throw ConfigError("config key 'channel.v_kmh' must be >= 0");
    return c;
}

MonteCarloSpec base_spec(const ExperimentConfig& cfg, const BerCommon& c) {
    MonteCarloSpec s;
    s.waveform = cfg.waveform;
    s.active = default_active_set(cfg.waveform);
    s.profile = c.profile;
    s.v_kmh = c.v_kmh;
    s.carrier_hz = c.carrier_hz;
    s.m_c = c.m_c;
    s.bits_per_trial = c.bits_per_trial;
    return s;
}

std::vector<std::string> ber_rows(const std::vector<BerPoint>& pts) {
    std::vector<std::string> rows;
    for (const auto& p : pts) {
        rows.push_back(fmt_num(p.snr_db) + "," + fmt_num(p.ber_theory_mean) + "," + fmt_num(p.ber_empirical_mean) +
                       "," + fmt_num(p.ber_empirical_mean == p.ber_empirical_mean ? p.ci_low : kNaN) + "," +
                       fmt_num(p.ber_empirical_mean == p.ber_empirical_mean ? p.ci_high : kNaN) + "," +
                       std::to_string(p.trials));
    }
    return rows;
}

const char* kBerColumns = "snr_db,ber_theory_mean,ber_empirical_mean,ci_low,ci_high,trials";

const char* kImpairmentNote =
    "impairment draws: offset ~ N(0, sigma) [rad | ppm*f_c Hz | sigma*T_s], slope ~ N(0, sigma/T_frame) "
    "for phase noise and N(0, sigma) for sampling skew; T_frame = (N+N_cpp)T_s";

std::vector<ChannelModel> read_models(const ConfigMap& p) {
    std::vector<ChannelModel> out;
    for (const auto& w : p.get_words("sweep.models", {"ct", "dt"})) {
        if (w == "ct") out.push_back(ChannelModel::ContinuousTime);
        else if (w == "dt") out.push_back(ChannelModel::DiscreteTime);
        else throw ConfigError("config key 'sweep.models': expected ct or dt, got '" + w + "'");
    }
    return out;
}

const char* model_tag(ChannelModel m) { return m == ChannelModel::ContinuousTime ? "ct" : "dt"; }

void summarize(RunResult& r, const std::string& tag, const std::vector<BerPoint>& pts) {
    std::string line = tag + ":";
    for (const auto& p : pts) line += " " + fmt_label(p.snr_db) + "dB=" + fmt_num(p.ber_theory_mean);
    r.summary.push_back(line);
}

RunResult run_ber_mobility(ExperimentConfig& cfg) {
    const BerCommon c = read_ber_common(cfg.params);
    const auto speeds = cfg.params.get_list("sweep.v_kmh", {0, 50, 150, 300, 450});
    const auto models = read_models(cfg.params);
    cfg.params.check_unused();
    RunResult r;
    CsvSink sink(cfg, r);
    for (auto model : models) {
        for (double v : speeds) {
            MonteCarloSpec s = base_spec(cfg, c);
            s.v_kmh = v;
            s.model = model;
            const auto pts = monte_carlo_ber(s, c.snr_db, cfg.trials, cfg.seed, cfg.threads);
            const std::string tag = std::string("ber_mobility_") + model_tag(model) + "_v" + fmt_label(v);
            sink.write(tag + ".csv", {std::string("model=") + model_tag(model) + " v_kmh=" + fmt_label(v)},
                       kBerColumns, ber_rows(pts));
            summarize(r, tag, pts);
        }
    }
    return r;
}

RunResult run_ber_paths(ExperimentConfig& cfg) {
    const BerCommon c = read_ber_common(cfg.params);
    const auto paths = cfg.params.get_list("sweep.paths", {2, 4, 6, 8, 10});
    const bool scale = cfg.params.get_int("sweep.scale_delay_spread", 1) != 0;
    const auto models = read_models(cfg.params);
    cfg.params.check_unused();
    RunResult r;
    CsvSink sink(cfg, r);
    for (auto model : models) {
        for (double lf : paths) {
            const int l = static_cast<int>(lf);
            if (l < 1 || lf != l) throw ConfigError("config key 'sweep.paths': entries must be positive integers");
            MonteCarloSpec s = base_spec(cfg, c);
            s.profile.n_paths = l;
            // Delay spread grows with the path count; the configured value applies to L = 3.
            if (scale) s.profile.delay_spread = c.profile.delay_spread * (l - 1) / 2.0;
            s.model = model;
            const auto pts = monte_carlo_ber(s, c.snr_db, cfg.trials, cfg.seed, cfg.threads);
            const std::string tag = std::string("ber_paths_") + model_tag(model) + "_L" + std::to_string(l);
            sink.write(tag + ".csv",
                       {std::string("model=") + model_tag(model) + " paths=" + std::to_string(l) +
                        " delay_spread_s=" + fmt_num(s.profile.delay_spread)},
                       kBerColumns, ber_rows(pts));
            summarize(r, tag, pts);
        }
    }
    return r;
}

RunResult run_ber_impairment(ExperimentConfig& cfg, ImpairmentKind kind, const std::string& key,
                             const std::vector<double>& defaults) {
    const BerCommon c = read_ber_common(cfg.params);
    const auto sigmas = cfg.params.get_list(key, defaults);
    cfg.params.check_unused();
    for (double s : sigmas) {
        if (!(s >= 0.0)) throw ConfigError("config key '" + key + "': entries must be >= 0");
    }
    RunResult r;
    CsvSink sink(cfg, r);
    for (int ofdm = 0; ofdm < 2; ++ofdm) {
        for (double sigma : sigmas) {
            MonteCarloSpec s = base_spec(cfg, c);
            if (ofdm) s.waveform = cfg.waveform.as_ofdm();
            s.impairment = ImpairmentSpec{kind, sigma};
            const auto pts = monte_carlo_ber(s, c.snr_db, cfg.trials, cfg.seed, cfg.threads);
            const std::string tag = cfg.experiment + (ofdm ? "_ofdm" : "_afdm") + "_s" + fmt_label(sigma);
            sink.write(tag + ".csv", {std::string("waveform=") + (ofdm ? "ofdm" : "afdm") + " sigma=" + fmt_label(sigma),
                                      kImpairmentNote},
                       kBerColumns, ber_rows(pts));
            summarize(r, tag, pts);
        }
    }
    return r;
}

RunResult run_psd(ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const long lp = p.get_int("psd.truncation", 17);
    const double sigma_c2 = p.get_double("psd.sigma_c2", 1.0);
    const double band = p.get_double("psd.band_hz", cfg.waveform.n() * cfg.waveform.delta_f);
    const double span = p.get_double("psd.span_hz", 4.0 / cfg.waveform.t_s);
    const double spacing = p.get_double("psd.spacing_hz", cfg.waveform.delta_f / 8.0);
    cfg.params.check_unused();
    if (lp < 1) throw ConfigError("config key 'psd.truncation' must be >= 1");
    if (!(band > 0.0)) throw ConfigError("config key 'psd.band_hz' must be > 0");
    if (!(span > band)) throw ConfigError("config key 'psd.span_hz' must exceed psd.band_hz");
    if (!(spacing > 0.0)) throw ConfigError("config key 'psd.spacing_hz' must be > 0");

    const auto freqs = uniform_frequencies(span, spacing);
    RunResult r;
    CsvSink sink(cfg, r);
    std::vector<std::string> oob_rows;
    for (int trunc = 0; trunc < 2; ++trunc) {
        for (int ofdm = 1; ofdm >= 0; --ofdm) {
            WaveformConfig w = ofdm ? cfg.waveform.as_ofdm() : cfg.waveform;
            PulseShape pulse = w.pulse;
            pulse.truncation = trunc ? std::optional<int>(static_cast<int>(lp)) : std::nullopt;
            w = WaveformConfig::make(w.daft, w.delta_f, w.n_cpp, w.oversample, pulse);
            const PsdGrid psd = normalized(analytic_psd(w, sigma_c2, freqs), w, sigma_c2);
            const std::string name = std::string(ofdm ? "ofdm" : "afdm") + (trunc ? "_trunc" : "");
            std::vector<std::string> rows;
            rows.reserve(psd.freqs.size());
            for (size_t i = 0; i < psd.freqs.size(); ++i) {
                const double db = 10.0 * std::log10(std::max(psd.values[i], 1e-300));
                rows.push_back(fmt_num(psd.freqs[i]) + "," + fmt_num(db));
            }
            sink.write("psd_" + name + ".csv", {"curve=" + name + " pulse=" + pulse.describe()}, "freq_hz,psd_db", rows);
            const double oob = oob_energy(psd, band);
            oob_rows.push_back(name + "," + fmt_num(oob));
            r.summary.push_back("oob " + name + " = " + fmt_label(oob) + " dB");
        }
    }
    sink.write("oob_summary.csv", {"band_hz=" + fmt_num(band)}, "curve,oob_db", oob_rows);
    return r;
}

RunResult run_crb(ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const auto lambdas = p.get_list("sweep.lambda1", {0.0, 0.003, 0.007});
    const auto snrs = p.get_list("sweep.snr_db", {0.0, 10.0, 20.0});
    const double sigma_c2 = p.get_double("crb.sigma_c2", 1.0);
    const double f_tau = p.get_double("crb.f_tau", 0.0);
    const double f_nu = p.get_double("crb.f_nu", 0.0);
    cfg.params.check_unused();
    const int n = cfg.waveform.n();
    const int n_u = default_active_set(cfg.waveform).n_u;
    const std::string pulse = cfg.waveform.pulse.describe();

    RunResult r;
    CsvSink sink(cfg, r);
    std::vector<std::string> rows;
    std::vector<std::string> ofdm_rows;
    for (double l1 : lambdas) {
        for (double snr_db : snrs) {
            CrbConfig c{DaftParams(n, l1, l1), n_u, sigma_c2, std::pow(10.0, snr_db / 10.0), f_tau, f_nu};
            const CrbPair num = crb_from_fim(fim_numeric(c));
            CrbPair closed{kNaN, kNaN};
            if (l1 >= 0.0 && l1 <= crb_validity_bound(n, n_u)) closed = crb_closed_afdm(c);
            const std::string head = fmt_num(snr_db) + "," + fmt_num(l1) + "," + pulse + ",";
            rows.push_back(head + fmt_num(closed.f_tau) + "," + fmt_num(closed.f_nu) + "," + fmt_num(num.f_tau) +
                           "," + fmt_num(num.f_nu));
            if (l1 == 0.0) {
                const CrbPair o = crb_closed_ofdm(c);
                ofdm_rows.push_back(head + fmt_num(o.f_tau) + "," + fmt_num(o.f_nu) + "," + fmt_num(num.f_tau) + "," +
                                    fmt_num(num.f_nu));
            }
        }
    }
    const std::string cols = "snr_db,lambda1,pulse,crb_ftau,crb_fnu,fim_ftau,fim_fnu";
    sink.write("crb.csv", {"n_u=" + std::to_string(n_u) + " crb_*: closed forms, fim_*: diag of inverse FIM"}, cols,
               rows);
    if (!ofdm_rows.empty()) {
        sink.write("crb_ofdm.csv", {"n_u=" + std::to_string(n_u) + " crb_*: OFDM-limit closed forms"}, cols, ofdm_rows);
    }
    r.summary.push_back("crb points: " + std::to_string(rows.size()));
    return r;
}

RunResult run_impulse_response(ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const auto bins = p.get_list("ir.delay_bins", {1.1, 3.0, 6.0});
    const double nu_max = p.get_double("ir.nu_max_hz", 12e3);
    const double fraction = p.get_double("ir.dominant_fraction", 0.5);
    const double peak_fraction = p.get_double("ir.peak_fraction", 0.25);
    cfg.params.check_unused();
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("config key 'ir.dominant_fraction' must be in (0,1)");
    if (!(peak_fraction > 0.0 && peak_fraction < 1.0)) throw ConfigError("config key 'ir.peak_fraction' must be in (0,1)");

    const DsChannel ch = ir_channel(cfg.waveform, bins, nu_max, cfg.seed);
    const ImpulseResponses ir = impulse_responses(cfg.waveform, ch);
    const int n = cfg.waveform.n();
    std::vector<std::string> rows;
    for (int i = 0; i < n; ++i) {
        std::string row = std::to_string(i) + "," + std::to_string(i - n / 2);
        for (const CVector* v : {&ir.ct_afdm, &ir.dt_afdm, &ir.ct_ofdm, &ir.dt_ofdm}) {
            row += "," + fmt_num((*v)[i].real()) + "," + fmt_num((*v)[i].imag());
        }
        rows.push_back(row);
    }
    RunResult r;
    CsvSink sink(cfg, r);
    sink.write("impulse_response.csv", {"input: unit symbol on subcarrier 0; subcarrier = index - N/2"},
               "index,subcarrier,ct_afdm_re,ct_afdm_im,dt_afdm_re,dt_afdm_im,ct_ofdm_re,ct_ofdm_im,dt_ofdm_re,dt_ofdm_im",
               rows);
    std::vector<std::string> ch_rows;
    std::istringstream is(channel_to_csv(ch));
    std::string line;
    std::getline(is, line);
    const std::string ch_cols = line;
    while (std::getline(is, line)) ch_rows.push_back(line);
    sink.write("ir_channel.csv", {}, ch_cols, ch_rows);

    const double nrms = nrms_dominant(ir.ct_afdm, ir.dt_afdm, fraction);
    const int c_afdm = count_clusters(ir.ct_afdm, peak_fraction);
    const int c_ofdm = count_clusters(ir.ct_ofdm, peak_fraction);
    sink.write("ir_summary.csv", {}, "metric,value",
               {"nrms_ct_vs_dt_afdm," + fmt_num(nrms), "clusters_afdm," + std::to_string(c_afdm),
                "clusters_ofdm," + std::to_string(c_ofdm)});
    r.summary.push_back("nrms(ct,dt) afdm = " + fmt_label(nrms) + ", clusters afdm = " + std::to_string(c_afdm) +
                        ", ofdm = " + std::to_string(c_ofdm));
    return r;
}

RunResult run_validate(ExperimentConfig& cfg) {
    cfg.params.check_unused();
    RunResult r;
    CsvSink sink(cfg, r);
    std::vector<std::string> rows;
    bool all = true;
    for (const auto& c : run_validation()) {
        all = all && c.pass;
        rows.push_back(c.name + "," + (c.pass ? "pass" : "fail") + "," + c.detail);
        r.summary.push_back(std::string(c.pass ? "PASS " : "FAIL ") + c.name + ": " + c.detail);
    }
    sink.write("validation.csv", {}, "check,result,detail", rows);
    r.status = all ? 0 : 2;
    return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"psd",     "ber_mobility", "ber_paths",        "ber_pn", "ber_cfo",
                                                "ber_sj",  "crb",          "impulse_response", "validate"};
    return names;
}

DsChannel ir_channel(const WaveformConfig& config, const std::vector<double>& delay_bins, double nu_max_hz,
                     std::uint64_t seed) {
    if (delay_bins.empty()) throw ConfigError("config key 'ir.delay_bins': empty list");
    Rng rng(derive_seed(seed, {11}));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(delay_bins.size()));
    std::vector<ChannelPath> paths;
    for (double b : delay_bins) {
        if (!(b >= 0.0)) throw ConfigError("config key 'ir.delay_bins': entries must be >= 0");
        const double phase = u(rng);
        const double theta = u(rng);
        paths.push_back({amp * cexpj(phase), b * config.t_s, nu_max_hz * std::cos(2.0 * kPi * theta)});
    }
    return DsChannel(std::move(paths));
}

ImpulseResponses impulse_responses(const WaveformConfig& config, const DsChannel& channel) {
    const WaveformConfig ofdm = config.as_ofdm();
    const ActiveSet active = default_active_set(config);
    ImpulseResponses ir{channel, {}, {}, {}, {}};
    ir.ct_afdm = impulse_response(effective_channel_ideal(channel, config, active));
    ir.dt_afdm = impulse_response(dt_reference_channel(channel, config));
    ir.ct_ofdm = impulse_response(effective_channel_ideal(channel, ofdm, default_active_set(ofdm)));
    ir.dt_ofdm = impulse_response(dt_reference_channel(channel, ofdm));
    return ir;
}

double nrms_dominant(const CVector& ref, const CVector& test, double fraction) {
    if (ref.size() != test.size() || ref.size() == 0) throw ConfigError("nrms_dominant: size mismatch");
    const double peak = ref.cwiseAbs().maxCoeff();
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < ref.size(); ++i) {
        const double a = std::abs(ref[i]);
        if (a < fraction * peak) continue;
        const double d = std::abs(test[i]) - a;
        num += d * d;
        den += a * a;
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

int count_clusters(const CVector& h, double fraction, int min_gap) {
    const long n = h.size();
    if (n == 0) return 0;
    const RVector mag = h.cwiseAbs();
    const double floor = fraction * mag.maxCoeff();
    std::vector<long> peaks;
    for (long i = 0; i < n; ++i) {
        const double prev = mag[(i + n - 1) % n];
        const double next = mag[(i + 1) % n];
        if (mag[i] >= floor && mag[i] > prev && mag[i] >= next) peaks.push_back(i);
    }
    if (peaks.size() < 2) return static_cast<int>(peaks.size());
    int clusters = 0;
    for (size_t k = 0; k < peaks.size(); ++k) {
        const long gap = (k + 1 < peaks.size()) ? peaks[k + 1] - peaks[k] : peaks[0] + n - peaks[k];
        if (gap >= min_gap) ++clusters;
    }
    return std::max(clusters, 1);
}

RunResult run(ExperimentConfig& config) {
    const std::string& e = config.experiment;
    if (e == "psd") return run_psd(config);
    if (e == "ber_mobility") return run_ber_mobility(config);
    if (e == "ber_paths") return run_ber_paths(config);
    if (e == "ber_pn") return run_ber_impairment(config, ImpairmentKind::PhaseNoise, "sweep.sigma_phi", {0, 0.001, 0.01, 0.1});
    if (e == "ber_cfo") return run_ber_impairment(config, ImpairmentKind::Cfo, "sweep.sigma_cfo_ppm", {0, 1e-7, 1e-6, 1e-5});
    if (e == "ber_sj") return run_ber_impairment(config, ImpairmentKind::Jitter, "sweep.sigma_sj", {0.1, 0.01, 0.001, 0.0001});
    if (e == "crb") return run_crb(config);
    if (e == "impulse_response") return run_impulse_response(config);
    if (e == "validate") return run_validate(config);
    throw ConfigError("config key 'experiment': unknown experiment '" + e + "'");
}

}  // namespace afdm
