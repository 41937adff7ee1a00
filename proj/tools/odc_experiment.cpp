#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "odc/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Damped decentralized LQR experiments"};

    std::string config_path, scenario, out_dir, builtin;
    std::uint64_t seed = 0;
    double alpha_max = 0.0, alpha_step = 0.0;
    bool have_seed = false;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--scenario", scenario,
                   "multistart | sweep | hysteresis | improve | anneal | theory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--builtin", builtin, "Builtin instance name (paper4x4)");
    auto* amax_opt = app.add_option("--alpha-max", alpha_max, "Sweep endpoint / peak damping");
    auto* astep_opt = app.add_option("--alpha-step", alpha_step, "Damping increment");

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;

    try {
        odc::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = odc::load_config_file(config_path);
        if (!scenario.empty()) cfg.scenario = odc::scenario_from_string(scenario);
        if (have_seed) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!builtin.empty()) {
            cfg.builtin = builtin;
            cfg.random.reset();
            cfg.inline_instance.reset();
        }
        if (amax_opt->count() > 0) cfg.alpha_max = alpha_max;
        if (astep_opt->count() > 0) cfg.alpha_step = alpha_step;

        int status = odc::run(cfg);
        if (status != odc::kExitOk) {
            std::cerr << "run finished with status " << status << "\n";
        }
        return status;
    } catch (const odc::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return odc::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return odc::kExitSolverFailure;
    }
}
