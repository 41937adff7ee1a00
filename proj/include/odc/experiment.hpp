#pragma once

#include <optional>
#include <string>

#include "odc/continuation.hpp"
#include "odc/instances.hpp"
#include "odc/theory.hpp"

namespace odc {

enum class Scenario { multistart, sweep, hysteresis, improve, anneal, theory };

Scenario scenario_from_string(const std::string& name);
const char* to_string(Scenario s);

struct RandomSpec {
    int n = 3;
    int m = 3;
    std::uint64_t seed = 0;
};

struct InlineInstance {
    Matrix A, B;
    std::optional<Matrix> Q, R, D0, mask;
};

struct ExperimentConfig {
    std::string run_id = "run";
    Scenario scenario = Scenario::sweep;

    // Exactly one instance source.
    std::string builtin;                     // "paper4x4"
    std::optional<RandomSpec> random;
    std::optional<InlineInstance> inline_instance;

    std::uint64_t seed = 0;
    double alpha_start = 0.0;
    double alpha_max = 0.6;
    double alpha_step = 0.002;
    int n_samples = 1000;
    double dedup_tol = 1e-2;
    double merge_tol = 1e-2;
    SolverConfig solver;
    std::string out_dir = ".";
};

// Parses a JSON config document. Throws ConfigError on any malformed input.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Builds the instance named by the config, recording assumption notes
// (e.g. the Q = R = I default) into *assumptions when non-null.
ProblemInstance make_instance(const ExperimentConfig& cfg,
                              std::vector<std::string>* assumptions = nullptr);

// Exit codes for run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSolverFailure = 4;

// Executes the configured scenario and writes <run_id>_trajectories.csv,
// <run_id>_summary.txt and <run_id>_manifest.json under out_dir.
int run(const ExperimentConfig& cfg);

// Shortest round-trip decimal formatting used for all CSV reals.
std::string format_double(double x);

// CSV header for m x n gains: fixed prefix plus k_i_j columns, row-major.
std::string trajectory_csv_header(int m, int n);

}  // namespace odc
