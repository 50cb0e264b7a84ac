// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "afdm/montecarlo.hpp"
#include "afdm/spectrum.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace afdm {

// Flat key=value text with dotted sections; '#' starts a comment.
// Getters record the value actually used (defaults included) so outputs can echo it.
class ConfigMap {
public:
    static ConfigMap parse(const std::string& text);
    static ConfigMap load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_words(const std::string& key, const std::vector<std::string>& fallback) const;

    // Throws ConfigError naming the first key that no getter consumed.
    void check_unused() const;
    // Drops a key from the echo and hash (output paths do not change results).
    void unrecord(const std::string& key) const { resolved_.erase(key); }
    const std::map<std::string, std::string>& resolved() const { return resolved_; }
    std::string resolved_text() const;
    std::uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> resolved_;
    mutable std::map<std::string, bool> used_;
    const std::string* lookup(const std::string& key) const;
};

std::uint64_t fnv1a64(const std::string& text);

struct ExperimentConfig {
    std::string experiment;
    WaveformConfig waveform;
    std::uint64_t seed = 1;
    int trials = 100;
    int threads = 1;
    std::string out = "results";
    ConfigMap params;

    // Reads the common keys; experiment-specific keys are read by run().
    static ExperimentConfig from_map(ConfigMap map);
};

WaveformConfig waveform_from(const ConfigMap& map);
PulseShape pulse_from(const ConfigMap& map, const std::string& prefix = "pulse");

// Equal-power paths at the given delays (in units of T_s), uniform phases and
// Jakes Doppler nu_max cos(theta).
DsChannel ir_channel(const WaveformConfig& config, const std::vector<double>& delay_bins, double nu_max_hz,
                     std::uint64_t seed);

struct ImpulseResponses {
    DsChannel channel;
    CVector ct_afdm;
    CVector dt_afdm;
    CVector ct_ofdm;
    CVector dt_ofdm;
};

ImpulseResponses impulse_responses(const WaveformConfig& config, const DsChannel& channel);

// Normalized RMS of |test| - |ref| over the taps where |ref| >= fraction * max|ref|.
double nrms_dominant(const CVector& ref, const CVector& test, double fraction);

// Circular local maxima of |h| at or above fraction * max|h|; maxima closer than
// min_gap taps are merged into one cluster.
int count_clusters(const CVector& h, double fraction, int min_gap = 2);

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<ValidationCheck> run_validation();

struct RunResult {
    int status = 0;
    std::vector<std::string> files;
    std::vector<std::string> summary;
};

// Writes CSV artifacts under config.out. Throws ConfigError / NumericalError.
RunResult run(ExperimentConfig& config);

const std::vector<std::string>& experiment_names();

}  // namespace afdm
