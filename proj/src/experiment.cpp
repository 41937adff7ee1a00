#include "odc/experiment.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace odc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Matrix matrix_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw ConfigError(std::string("config: ") + name + " must be a 2D numeric array");
    }
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) {
            throw ConfigError(std::string("config: ragged rows in ") + name);
        }
        for (int c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) {
                throw ConfigError(std::string("config: non-numeric entry in ") + name);
            }
            M(i, c) = j[i][c].get<double>();
        }
    }
    return M;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

Scenario scenario_from_string(const std::string& name) {
    if (name == "multistart") return Scenario::multistart;
    if (name == "sweep") return Scenario::sweep;
    if (name == "hysteresis") return Scenario::hysteresis;
    if (name == "improve") return Scenario::improve;
    if (name == "anneal") return Scenario::anneal;
    if (name == "theory") return Scenario::theory;
    throw ConfigError("config: unknown scenario '" + name + "'");
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::multistart: return "multistart";
        case Scenario::sweep: return "sweep";
        case Scenario::hysteresis: return "hysteresis";
        case Scenario::improve: return "improve";
        case Scenario::anneal: return "anneal";
        case Scenario::theory: return "theory";
    }
    return "unknown";
}

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    ExperimentConfig cfg;
    try {
        if (j.contains("run_id")) cfg.run_id = j.at("run_id").get<std::string>();
        if (j.contains("scenario")) {
            cfg.scenario = scenario_from_string(j.at("scenario").get<std::string>());
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("alpha_start")) cfg.alpha_start = j.at("alpha_start").get<double>();
        if (j.contains("alpha_max")) cfg.alpha_max = j.at("alpha_max").get<double>();
        if (j.contains("alpha_step")) cfg.alpha_step = j.at("alpha_step").get<double>();
        if (j.contains("n_samples")) cfg.n_samples = j.at("n_samples").get<int>();
        if (j.contains("dedup_tol")) cfg.dedup_tol = j.at("dedup_tol").get<double>();
        if (j.contains("merge_tol")) cfg.merge_tol = j.at("merge_tol").get<double>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            if (s.contains("grad_tol")) cfg.solver.grad_tol = s.at("grad_tol").get<double>();
            if (s.contains("max_iters")) cfg.solver.max_iters = s.at("max_iters").get<int>();
            if (s.contains("stability_tol")) {
                cfg.solver.stability_tol = s.at("stability_tol").get<double>();
            }
            if (s.contains("armijo_c")) cfg.solver.line_search.armijo_c = s.at("armijo_c").get<double>();
            if (s.contains("shrink")) cfg.solver.line_search.shrink = s.at("shrink").get<double>();
            if (s.contains("initial_step")) {
                cfg.solver.line_search.initial_step = s.at("initial_step").get<double>();
            }
            if (s.contains("max_backtracks")) {
                cfg.solver.line_search.max_backtracks = s.at("max_backtracks").get<int>();
            }
        }
        if (j.contains("instance")) {
            const json& inst = j.at("instance");
            if (inst.contains("builtin")) {
                cfg.builtin = inst.at("builtin").get<std::string>();
            } else if (inst.contains("random")) {
                RandomSpec spec;
                spec.n = inst.at("random").at("n").get<int>();
                spec.m = inst.at("random").at("m").get<int>();
                spec.seed = inst.at("random").at("seed").get<std::uint64_t>();
                cfg.random = spec;
            } else if (inst.contains("A") && inst.contains("B")) {
                InlineInstance in;
                in.A = matrix_from_json(inst.at("A"), "A");
                in.B = matrix_from_json(inst.at("B"), "B");
                if (inst.contains("Q")) in.Q = matrix_from_json(inst.at("Q"), "Q");
                if (inst.contains("R")) in.R = matrix_from_json(inst.at("R"), "R");
                if (inst.contains("D0")) in.D0 = matrix_from_json(inst.at("D0"), "D0");
                if (inst.contains("mask")) in.mask = matrix_from_json(inst.at("mask"), "mask");
                cfg.inline_instance = std::move(in);
            } else {
                throw ConfigError("config: instance must name a builtin, a random spec, or A/B");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.solver.grad_tol <= 0.0) throw ConfigError("config: grad_tol must be > 0");
    if (cfg.n_samples < 1) throw ConfigError("config: n_samples must be >= 1");
    if (cfg.alpha_step <= 0.0) throw ConfigError("config: alpha_step must be > 0");
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

ProblemInstance make_instance(const ExperimentConfig& cfg, std::vector<std::string>* assumptions) {
    auto note = [&](const std::string& s) {
        if (assumptions) assumptions->push_back(s);
    };
    if (!cfg.builtin.empty()) {
        if (cfg.builtin != "paper4x4") {
            throw ConfigError("config: unknown builtin '" + cfg.builtin + "'");
        }
        note("builtin paper4x4 uses Q = I, R = I defaults (not part of the published instance)");
        return paper_4x4();
    }
    if (cfg.random) {
        note("random instance uses Q = I, R = I, D0 = I and a diagonal mask");
        return random_instance(cfg.random->n, cfg.random->m, cfg.random->seed);
    }
    if (cfg.inline_instance) {
        const InlineInstance& in = *cfg.inline_instance;
        const int n = static_cast<int>(in.A.rows());
        const int m = static_cast<int>(in.B.cols());
        Matrix Q = in.Q.value_or(Matrix::Identity(n, n));
        Matrix R = in.R.value_or(Matrix::Identity(m, m));
        Matrix D0 = in.D0.value_or(Matrix::Identity(n, n));
        Matrix mask = in.mask.value_or(Matrix::Ones(m, n));
        if (!in.Q || !in.R) note("inline instance: missing Q/R default to I");
        try {
            return ProblemInstance(in.A, in.B, Q, R, D0, SparsityMask(mask));
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("config: invalid inline instance: ") + e.what());
        }
    }
    throw ConfigError("config: no instance source given");
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string trajectory_csv_header(int m, int n) {
    std::string h = "run_id,trajectory_id,alpha,cost,grad_norm,iterations,status,dist_to_best";
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            h += ",k_" + std::to_string(i) + "_" + std::to_string(j);
        }
    }
    return h;
}

namespace {

std::string csv_row(const std::string& run_id, int traj_id, double alpha, double cost_value,
                    double grad_norm, int iterations, const std::string& status,
                    double dist_to_best, const Matrix& K) {
    std::string row = run_id + "," + std::to_string(traj_id) + "," + format_double(alpha) + "," +
                      format_double(cost_value) + "," + format_double(grad_norm) + "," +
                      std::to_string(iterations) + "," + status + "," + format_double(dist_to_best);
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            row += "," + format_double(K(i, j));
        }
    }
    return row;
}

struct RunOutputs {
    std::string csv;
    std::string summary;
};

void emit_multistart(const ExperimentConfig& cfg, const ProblemInstance& inst, RunOutputs& out) {
    auto sols = multi_start(inst, cfg.alpha_start, cfg.n_samples, cfg.seed, cfg.solver,
                            cfg.dedup_tol);
    out.summary += "scenario: multistart\n";
    out.summary += "alpha: " + format_double(cfg.alpha_start) + "\n";
    out.summary += "clusters: " + std::to_string(sols.size()) + "\n";
    if (sols.empty()) {
        out.summary += "diagnostic: no stabilizing sample converged\n";
        return;
    }
    const Matrix& best = sols.front().K.K;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        out.csv += csv_row(cfg.run_id, static_cast<int>(i), cfg.alpha_start, sols[i].cost,
                           sols[i].grad_norm, sols[i].iterations, to_string(sols[i].status),
                           (sols[i].K.K - best).norm(), sols[i].K.K) + "\n";
        out.summary += "cluster " + std::to_string(i) + ": cost " + format_double(sols[i].cost) +
                       "\n";
    }
}

void emit_trajectory(const ExperimentConfig& cfg, const Trajectory& traj,
                     const std::string& status_last, RunOutputs& out) {
    for (std::size_t p = 0; p < traj.points.size(); ++p) {
        const TrajectoryPoint& pt = traj.points[p];
        bool last = p + 1 == traj.points.size();
        out.csv += csv_row(cfg.run_id, traj.id, pt.alpha, pt.cost, pt.grad_norm, pt.iterations,
                           last ? status_last : "alive", pt.dist_to_best, pt.K.K) + "\n";
    }
}

const char* trajectory_status_name(const Trajectory& t) {
    switch (t.status) {
        case TrajectoryStatus::alive: return "alive";
        case TrajectoryStatus::lost: return "lost";
        case TrajectoryStatus::merged: return "merged";
    }
    return "unknown";
}

void emit_sweep(const ExperimentConfig& cfg, const ProblemInstance& inst, RunOutputs& out) {
    auto starts = multi_start(inst, cfg.alpha_start, cfg.n_samples, cfg.seed, cfg.solver,
                              cfg.dedup_tol);
    out.summary += "scenario: sweep\n";
    out.summary += "initial clusters: " + std::to_string(starts.size()) + "\n";
    if (starts.empty()) {
        out.summary += "diagnostic: no stabilizing sample converged\n";
        return;
    }
    DampingSchedule schedule =
        DampingSchedule::increasing(cfg.alpha_start, cfg.alpha_max, cfg.alpha_step);
    TrajectoryBundle bundle = track_bundle(inst, starts, schedule, cfg.solver, cfg.merge_tol);
    for (const Trajectory& t : bundle.trajectories) {
        emit_trajectory(cfg, t, trajectory_status_name(t), out);
    }
    int alive = 0;
    for (const Trajectory& t : bundle.trajectories) {
        if (t.status == TrajectoryStatus::alive) ++alive;
    }
    out.summary += "alive at alpha_max: " + std::to_string(alive) + "\n";
    for (const MergeEvent& e : bundle.merge_events) {
        out.summary += "merge: alpha " + format_double(e.alpha) + " trajectory " +
                       std::to_string(e.absorbed_id) + " -> " + std::to_string(e.survivor_id) +
                       "\n";
    }
}

void emit_hysteresis(const ExperimentConfig& cfg, const ProblemInstance& inst, RunOutputs& out) {
    auto starts = multi_start(inst, cfg.alpha_start, cfg.n_samples, cfg.seed, cfg.solver,
                              cfg.dedup_tol);
    out.summary += "scenario: hysteresis\n";
    if (starts.empty()) {
        out.summary += "diagnostic: no stabilizing sample converged\n";
        return;
    }
    // Worst local optimum makes the loop visible.
    const LocalSolution& start = starts.back();
    Trajectory loop =
        hysteresis(inst, start, cfg.alpha_start, cfg.alpha_max, cfg.alpha_step, cfg.solver);
    emit_trajectory(cfg, loop, trajectory_status_name(loop), out);
    out.summary += "start cost: " + format_double(start.cost) + "\n";
    out.summary += "final cost: " + format_double(loop.points.back().cost) + "\n";
    out.summary += "status: " + std::string(trajectory_status_name(loop)) + "\n";
}

void emit_improve(const ExperimentConfig& cfg, const ProblemInstance& inst, RunOutputs& out) {
    auto starts = multi_start(inst, cfg.alpha_start, cfg.n_samples, cfg.seed, cfg.solver,
                              cfg.dedup_tol);
    out.summary += "scenario: improve\n";
    if (starts.empty()) {
        out.summary += "diagnostic: no stabilizing sample converged\n";
        return;
    }
    const LocalSolution& worst = starts.back();
    ImproveResult result =
        improve_by_damping(inst, worst.K, cfg.alpha_max, cfg.alpha_step, cfg.solver);
    out.csv += csv_row(cfg.run_id, 0, 0.0, worst.cost, worst.grad_norm, worst.iterations,
                       "start", 0.0, worst.K.K) + "\n";
    out.csv += csv_row(cfg.run_id, 0, 0.0, result.cost, 0.0, 0,
                       result.improved ? "improved" : "no_improvement", 0.0, result.K.K) + "\n";
    out.summary += "start cost: " + format_double(worst.cost) + "\n";
    out.summary += "final cost: " + format_double(result.cost) + "\n";
    out.summary += std::string("improved: ") + (result.improved ? "yes" : "no") + "\n";
}

void emit_anneal(const ExperimentConfig& cfg, const ProblemInstance& inst, RunOutputs& out) {
    AnnealResult result = anneal_from_damped(inst, cfg.alpha_max, cfg.alpha_step, cfg.solver,
                                             cfg.seed, cfg.n_samples);
    out.summary += "scenario: anneal\n";
    out.summary += std::string("success: ") + (result.success ? "yes" : "no") + "\n";
    if (result.K.K.size() > 0) {
        out.csv += csv_row(cfg.run_id, 0, result.success ? 0.0 : cfg.alpha_max, result.cost, 0.0,
                           0, result.success ? "converged" : "lost", 0.0, result.K.K) + "\n";
        out.summary += "final cost: " + format_double(result.cost) + "\n";
    }
}

void emit_theory(const ExperimentConfig& cfg, const ProblemInstance& inst, RunOutputs& out) {
    out.summary += "scenario: theory\n";
    auto line = [&](const std::string& name, bool ok, const std::string& detail) {
        out.summary += std::string(ok ? "PASS " : "FAIL ") + name +
                       (detail.empty() ? "" : " (" + detail + ")") + "\n";
    };

    // Find a stabilizing point; escalate damping until one appears.
    std::vector<LocalSolution> sols;
    double alpha0 = std::max(cfg.alpha_start, 0.0);
    for (double a = alpha0;; a = (a == 0.0 ? 1.0 : a * 4.0)) {
        sols = multi_start(inst, a, std::min(cfg.n_samples, 50), cfg.seed, cfg.solver,
                           cfg.dedup_tol);
        if (!sols.empty()) { alpha0 = a; break; }
        if (a > 1000.0) break;
    }
    if (sols.empty()) {
        line("damping_property", false, "no stabilizing point found");
    } else {
        const Matrix& K = sols.front().K.K;
        auto damping = check_damping_property(inst, K, {alpha0, alpha0 + 0.5, alpha0 + 1.0});
        line("damping_property", damping.passed,
             damping.passed ? "" : "violation near alpha " + format_double(damping.alpha_hi));
        auto bounds = check_appendix_b_bounds(inst, K, alpha0);
        line("appendix_b_lambda_min", bounds.lambda_min_ok,
             "slack " + format_double(bounds.lambda_min_L - bounds.lambda_min_bound));
        if (bounds.norm_bound_applicable) {
            line("appendix_b_norm", bounds.norm_ok,
                 "slack " + format_double(bounds.norm_bound - bounds.norm_L));
        } else {
            out.summary += "SKIP appendix_b_norm (denominator not positive)\n";
        }
        try {
            double hmin = check_hessian_pd(inst, 1.0, 100.0, 50, cfg.seed);
            line("hessian_pd_alpha100", hmin > 0.0, "min eig " + format_double(hmin));
        } catch (const InstabilityError& e) {
            line("hessian_pd_alpha100", false, e.what());
        }
    }

    std::vector<std::pair<std::string, Matrix>> directions;
    auto mat2 = [](double a, double b, double c, double d) {
        Matrix M(2, 2);
        M << a, b, c, d;
        return M;
    };
    directions.emplace_back("jordan_block", mat2(-1, 1, 0, -1));
    directions.emplace_back("nilpotent", mat2(0, 1, 0, 0));
    directions.emplace_back("rotation", mat2(0, 2, -2, 0));
    directions.emplace_back("complex_pair", mat2(-1, 1, -1, -1));
    Matrix d3 = Matrix::Zero(3, 3);
    d3(0, 0) = -1;
    directions.emplace_back("diag_rank1", d3);
    d3(1, 1) = -1;
    directions.emplace_back("diag_rank2", d3);
    d3(1, 1) = -0.5;
    d3(2, 2) = -0.25;
    directions.emplace_back("diag_full", d3);
    for (const auto& [name, H] : directions) {
        try {
            auto cert = stable_direction_counterexample(H);
            line("certificate_" + name, true,
                 "abscissas " + format_double(cert.abscissa_A) + " / " +
                     format_double(cert.abscissa_At0H));
        } catch (const Error& e) {
            line("certificate_" + name, false, e.what());
        }
    }
    try {
        stable_direction_counterexample(-3.0 * Matrix::Identity(3, 3));
        line("reject_minus_identity", false, "certificate returned for -3I");
    } catch (const NotACounterexampleError&) {
        line("reject_minus_identity", true, "");
    }
    try {
        auto [t1, t2] = disconnected_t_set();
        line("disconnected_t_set", true,
             "t1 " + format_double(t1) + " t2 " + format_double(t2));
    } catch (const Error& e) {
        line("disconnected_t_set", false, e.what());
    }
}

json config_echo(const ExperimentConfig& cfg) {
    json j;
    j["run_id"] = cfg.run_id;
    j["scenario"] = to_string(cfg.scenario);
    j["seed"] = cfg.seed;
    j["alpha_start"] = cfg.alpha_start;
    j["alpha_max"] = cfg.alpha_max;
    j["alpha_step"] = cfg.alpha_step;
    j["n_samples"] = cfg.n_samples;
    j["dedup_tol"] = cfg.dedup_tol;
    j["merge_tol"] = cfg.merge_tol;
    j["out_dir"] = cfg.out_dir;
    j["solver"] = {{"grad_tol", cfg.solver.grad_tol},
                   {"max_iters", cfg.solver.max_iters},
                   {"stability_tol", cfg.solver.stability_tol},
                   {"armijo_c", cfg.solver.line_search.armijo_c},
                   {"shrink", cfg.solver.line_search.shrink},
                   {"initial_step", cfg.solver.line_search.initial_step},
                   {"max_backtracks", cfg.solver.line_search.max_backtracks}};
    if (!cfg.builtin.empty()) j["instance"] = {{"builtin", cfg.builtin}};
    if (cfg.random) {
        j["instance"] = {{"random", {{"n", cfg.random->n},
                                     {"m", cfg.random->m},
                                     {"seed", cfg.random->seed}}}};
    }
    if (cfg.inline_instance) {
        j["instance"] = {{"A", matrix_to_json(cfg.inline_instance->A)},
                         {"B", matrix_to_json(cfg.inline_instance->B)}};
    }
    return j;
}

}  // namespace

int run(const ExperimentConfig& cfg) {
    auto t_begin = std::chrono::steady_clock::now();

    std::vector<std::string> assumptions;
    ProblemInstance inst = make_instance(cfg, &assumptions);

    RunOutputs out;
    out.csv = trajectory_csv_header(inst.m(), inst.n()) + "\n";

    int status = kExitOk;
    try {
        switch (cfg.scenario) {
            case Scenario::multistart: emit_multistart(cfg, inst, out); break;
            case Scenario::sweep: emit_sweep(cfg, inst, out); break;
            case Scenario::hysteresis: emit_hysteresis(cfg, inst, out); break;
            case Scenario::improve: emit_improve(cfg, inst, out); break;
            case Scenario::anneal: emit_anneal(cfg, inst, out); break;
            case Scenario::theory: emit_theory(cfg, inst, out); break;
        }
    } catch (const InstabilityError& e) {
        status = kExitInfeasible;
        out.csv += cfg.run_id + ",-1,nan,nan,nan,0,failure,nan\n";
        out.summary += std::string("error: ") + e.what() + "\n";
    } catch (const Error& e) {
        status = kExitSolverFailure;
        out.csv += cfg.run_id + ",-1,nan,nan,nan,0,failure,nan\n";
        out.summary += std::string("error: ") + e.what() + "\n";
    }

    fs::create_directories(cfg.out_dir);
    std::string csv_name = cfg.run_id + "_trajectories.csv";
    std::string summary_name = cfg.run_id + "_summary.txt";
    std::string manifest_name = cfg.run_id + "_manifest.json";
    {
        std::ofstream f(fs::path(cfg.out_dir) / csv_name, std::ios::binary);
        f << out.csv;
    }
    {
        std::ofstream f(fs::path(cfg.out_dir) / summary_name, std::ios::binary);
        f << out.summary;
    }

    auto t_end = std::chrono::steady_clock::now();
    json manifest;
    manifest["run_id"] = cfg.run_id;
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_echo(cfg);
    manifest["assumptions"] = assumptions;
    manifest["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::duration<double>>(t_end - t_begin).count();
    manifest["exit_status"] = status;
    manifest["files"] = json::array({{{"name", csv_name}, {"fnv1a64", hex64(fnv1a64(out.csv))}},
                                     {{"name", summary_name},
                                      {"fnv1a64", hex64(fnv1a64(out.summary))}}});
    {
        std::ofstream f(fs::path(cfg.out_dir) / manifest_name, std::ios::binary);
        f << manifest.dump(2) << "\n";
    }
    return status;
}

}  // namespace odc
