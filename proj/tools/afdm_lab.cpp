// SPDX-License-Identifier: Apache-2.0
// afdm-lab <experiment> --config <path> [--seed S] [--out DIR] [--threads K]
#include "afdm/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

namespace {

int default_threads() {
    const char* env = std::getenv("AFDM_LAB_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw afdm::ConfigError("AFDM_LAB_THREADS must be a positive integer");
    return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AFDM waveform and channel experiments"};
    std::string experiment;
    std::string config_path;
    long long seed = -1;
    std::string out_dir;
    int threads = 0;
    app.add_option("experiment", experiment, "psd | ber_mobility | ber_paths | ber_pn | ber_cfo | ber_sj | crb | "
                                             "impulse_response | validate")
        ->required();
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--seed", seed, "overrides the config seed")->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--threads", threads, "worker threads (default: AFDM_LAB_THREADS or 1)")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        afdm::ConfigMap map;
        if (!config_path.empty()) {
            map = afdm::ConfigMap::load(config_path);
        } else if (experiment != "validate") {
            throw afdm::ConfigError("--config is required for experiment '" + experiment + "'");
        }
        if (map.has("experiment") && map.get_string("experiment", "") != experiment) {
            throw afdm::ConfigError("config key 'experiment' does not match the command line ('" + experiment + "')");
        }
        map.set("experiment", experiment);
        if (seed >= 0) map.set("seed", std::to_string(seed));
        if (!out_dir.empty()) map.set("out", out_dir);
        afdm::ExperimentConfig cfg = afdm::ExperimentConfig::from_map(std::move(map));
        cfg.threads = threads > 0 ? threads : default_threads();
        const afdm::RunResult r = afdm::run(cfg);
        for (const auto& line : r.summary) std::cout << line << "\n";
        for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
        return r.status;
    } catch (const afdm::ConfigError& e) {
        std::cerr << "afdm-lab: config error: " << e.what() << "\n";
        return 1;
    } catch (const afdm::NumericalError& e) {
        std::cerr << "afdm-lab: numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "afdm-lab: numerical error: " << e.what() << "\n";
        return 2;
    }
}
