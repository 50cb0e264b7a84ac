// SPDX-License-Identifier: Apache-2.0
#include "afdm/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace afdm {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (trim(text.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(text);
    while (std::getline(is, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(cell);
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ConfigMap ConfigMap::parse(const std::string& text) {
    ConfigMap m;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        for (char c : key) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
                throw ConfigError("config line " + std::to_string(lineno) + ": invalid key '" + key + "'");
            }
        }
        if (m.values_.count(key)) throw ConfigError("config key '" + key + "' given twice");
        m.values_[key] = value;
    }
    return m;
}

ConfigMap ConfigMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ConfigMap::set(const std::string& key, const std::string& value) { values_[key] = value; }

const std::string* ConfigMap::lookup(const std::string& key) const {
    used_[key] = true;
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = lookup(key);
    const std::string out = v ? *v : fallback;
    resolved_[key] = out;
    return out;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const auto* v = lookup(key);
    const double out = v ? parse_double(key, *v) : fallback;
    resolved_[key] = format_double(out);
    return out;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
    const auto* v = lookup(key);
    long out = fallback;
    if (v) {
        const double d = parse_double(key, *v);
        if (d != std::floor(d)) throw ConfigError("config key '" + key + "': expected an integer");
        out = static_cast<long>(d);
    }
    resolved_[key] = std::to_string(out);
    return out;
}

std::vector<double> ConfigMap::get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto* v = lookup(key);
    std::vector<double> out = fallback;
    if (v) {
        out.clear();
        for (const auto& cell : split_list(*v)) out.push_back(parse_double(key, cell));
        if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    }
    std::string text;
    for (size_t i = 0; i < out.size(); ++i) text += (i ? "," : "") + format_double(out[i]);
    resolved_[key] = text;
    return out;
}

std::vector<std::string> ConfigMap::get_words(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto* v = lookup(key);
    std::vector<std::string> out = v ? split_list(*v) : fallback;
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    std::string text;
    for (size_t i = 0; i < out.size(); ++i) text += (i ? "," : "") + out[i];
    resolved_[key] = text;
    return out;
}

void ConfigMap::check_unused() const {
    for (const auto& [key, value] : values_) {
        if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
}

std::string ConfigMap::resolved_text() const {
    std::string out;
    for (const auto& [k, v] : resolved_) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t ConfigMap::hash() const { return fnv1a64(resolved_text()); }

PulseShape pulse_from(const ConfigMap& map, const std::string& prefix) {
    const std::string kind = map.get_string(prefix + ".kind", "rrc");
    const long trunc = map.get_int(prefix + ".truncation", 0);
    std::optional<int> lp;
    if (trunc > 0) lp = static_cast<int>(trunc);
    if (trunc < 0) throw ConfigError("config key '" + prefix + ".truncation' must be >= 0");
    if (kind == "rrc") return PulseShape::rrc(map.get_double(prefix + ".rolloff", 0.25), lp);
    if (kind == "gaussian") return PulseShape::gaussian(map.get_double(prefix + ".bandwidth_hz", 0.5e6), lp);
    if (kind == "rect") return PulseShape::rect(map.get_double(prefix + ".duration_s", 2.0 / 0.96e6), lp);
    throw ConfigError("config key '" + prefix + ".kind': expected rrc, gaussian or rect");
}

WaveformConfig waveform_from(const ConfigMap& map) {
    const long n = map.get_int("waveform.n", 64);
    const double l1 = map.get_double("waveform.lambda1", 0.007);
    const double l2 = map.get_double("waveform.lambda2", l1);
    const double df = map.get_double("waveform.delta_f", 15e3);
    const long n_cpp = map.get_int("waveform.n_cpp", 4);
    const long nc = map.get_int("waveform.oversample", 10);
    return WaveformConfig::make(DaftParams(static_cast<int>(n), l1, l2), df, static_cast<int>(n_cpp),
                                static_cast<int>(nc), pulse_from(map));
}

ExperimentConfig ExperimentConfig::from_map(ConfigMap map) {
    ExperimentConfig c;
    c.experiment = map.get_string("experiment", "");
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
        throw ConfigError("config key 'experiment': unknown experiment '" + c.experiment + "'");
    }
    const long seed = map.get_int("seed", 1);
    if (seed < 0) throw ConfigError("config key 'seed' must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.trials = static_cast<int>(map.get_int("trials", 100));
    if (c.trials < 1) throw ConfigError("config key 'trials' must be >= 1");
    c.out = map.get_string("out", "results");
    map.unrecord("out");
    if (c.experiment != "validate") c.waveform = waveform_from(map);
    c.params = std::move(map);
    return c;
}

}  // namespace afdm
