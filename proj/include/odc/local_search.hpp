#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odc/objective.hpp"

namespace odc {

struct LineSearchParams {
    double armijo_c = 0.001;   // sufficient-decrease constant
    double shrink = 0.5;       // backtracking factor
    double initial_step = 1.0;
    int max_backtracks = 60;
};

struct SolverConfig {
    LineSearchParams line_search;
    double grad_tol = 1e-3;
    int max_iters = 100000;
    double stability_tol = 1e-9;
};

enum class SolveStatus { converged, iteration_cap, line_search_stall };

const char* to_string(SolveStatus s);

struct LocalSolution {
    Controller K;
    double cost = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::converged;
};

// Largest step s in {s0, s0*b, s0*b^2, ...} such that K + s*direction is
// stabilizing and satisfies the Armijo inequality
//   J(K + s*dir) < J(K) + c * s * <grad, dir>.
// Instability is treated exactly like insufficient decrease. Returns nullopt
// when max_backtracks is exhausted.
// current_cost and grad are the evaluation at K; direction must be masked
// with <grad, direction> < 0.
std::optional<double> armijo_step(const ProblemInstance& inst, const Matrix& K,
                                  const Matrix& direction, double alpha,
                                  const LineSearchParams& params, double current_cost,
                                  const Matrix& grad, double stability_tol);

// Projected gradient descent from K0 (masked, stabilizing).
LocalSolution minimize(const ProblemInstance& inst, const Controller& K0, double alpha,
                       const SolverConfig& cfg);

// Samples n_samples gains with i.i.d. N(0,1) free entries, discards
// non-stabilizing ones, minimizes from the rest, and clusters the converged
// results. Output sorted by (cost, lexicographic K); deterministic per seed.
std::vector<LocalSolution> multi_start(const ProblemInstance& inst, double alpha,
                                       int n_samples, std::uint64_t rng_seed,
                                       const SolverConfig& cfg, double dedup_tol = 1e-2);

}  // namespace odc
