// Command-line front end: scenario runs and figure-style experiment sweeps.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "ofdmrad/experiments.hpp"

using namespace ofdmrad;

int main(int argc, char** argv) {
    CLI::App app{"OFDM radar simulation: beyond-CP sensing with interference cleaning"};

    std::string scenario_path, out_dir = "out", experiment, algo;
    std::uint64_t seed = 1;
    int trials = 0;

    app.add_option("--scenario", scenario_path, "Scenario JSON file");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Base RNG seed");
    app.add_option("--algo", algo, "Override scenario algorithm (conventional|jic_cc|fr_sw|sic)");
    app.add_option("--trials", trials, "Override Monte Carlo trial count");
    app.add_option("--experiment", experiment,
                   "Experiment kind: noise-floors | max-range | sinr-sweep | sinr-sweep-desk | "
                   "estimator-mae | scenario | complexity");

    CLI11_PARSE(app, argc, argv);

    if (const char* env = std::getenv("OFDMRAD_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }

    try {
        ExperimentResult result;
        if (!experiment.empty()) {
            if (experiment == "noise-floors") {
                result = experiments::run_noise_floors(out_dir);
            } else if (experiment == "max-range") {
                result = experiments::run_max_range(out_dir);
            } else if (experiment == "sinr-sweep" || experiment == "sinr-sweep-desk") {
                auto setup = experiment == "sinr-sweep" ? experiments::sinr_sweep_setup_full()
                                                        : experiments::sinr_sweep_setup_desk();
                setup.seed = seed;
                if (trials > 0) setup.trials = trials;
                result = experiments::run_sinr_sweep(setup, out_dir);
            } else if (experiment == "estimator-mae") {
                result = experiments::run_estimator_mae(out_dir, seed);
            } else if (experiment == "scenario") {
                result = experiments::run_table_scenario(out_dir, seed);
            } else if (experiment == "complexity") {
                result = experiments::run_complexity(out_dir);
            } else {
                std::cerr << "unknown experiment kind '" << experiment << "'\n";
                return 2;
            }
        } else if (!scenario_path.empty()) {
            Scenario s = io::load_scenario(scenario_path);
            if (!algo.empty()) {
                if (algo != "conventional" && algo != "jic_cc" && algo != "fr_sw" && algo != "sic")
                    throw ConfigError("algo", "unknown algorithm '" + algo + "'");
                s.algorithm = algo;
            }
            result = experiments::run_scenario_file(s, out_dir, seed);
        } else {
            std::cerr << "nothing to do: pass --scenario or --experiment (see --help)\n";
            return 2;
        }

        for (const auto& c : result.checks)
            std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << " = " << c.value << "  ("
                      << c.detail << ")\n";
        std::cout << "outputs in " << out_dir << "\n";
        return result.all_pass() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
