#pragma once

#include "odc/local_search.hpp"

namespace odc {

// Machine-verified witness that direction H leaves the stable set: A is
// stable but A + t0*H is not.
struct CounterexampleCertificate {
    Matrix H;
    Matrix A;
    double t0;
    double abscissa_A;      // < 0
    double abscissa_At0H;   // > 0
};

struct AsymptoticsReport {
    std::vector<double> alphas;
    std::vector<double> max_gain_norm;        // max ||K||_F over found local optima
    std::vector<double> max_cost;             // max J over found local optima
    std::vector<double> hessian_min_eig;      // min eig of projected Hessian over a sampled
                                              // unit ball (NaN when the ball destabilizes)
    bool passed = false;                      // >= 10x shrink from first to last alpha
};

struct DampingCheckResult {
    bool passed;
    // First violating grid pair, when passed == false.
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    double cost_lo = 0.0;
    double cost_hi = 0.0;
};

struct BoundCheckResult {
    bool lambda_min_ok;
    double lambda_min_L;
    double lambda_min_bound;      // lambda_min(D0) / (2a + 2||A+BK||)
    bool norm_bound_applicable;   // denominator of the ||L|| bound positive
    bool norm_ok;                 // valid only when applicable
    double norm_L;
    double norm_bound;
};

// Verifies J(K, .) is strictly decreasing along a sorted alpha grid.
DampingCheckResult check_damping_property(const ProblemInstance& inst, const Matrix& K,
                                          const std::vector<double>& alpha_grid);

// Runs multi_start at each alpha and reports the shrink of max ||K|| and max J.
// Requires a block-diagonal mask with square all-ones blocks and R sharing the
// mask's sparsity pattern.
AsymptoticsReport check_asymptotic_zero(const ProblemInstance& inst,
                                        const std::vector<double>& alphas, int samples,
                                        const SolverConfig& cfg, std::uint64_t rng_seed = 0);

// Minimum eigenvalue of the projected Hessian over n_samples masked gains
// drawn uniformly from the Frobenius ball of radius r. Throws InstabilityError
// if alpha is too small for the whole sample to be stabilizing.
double check_hessian_pd(const ProblemInstance& inst, double r, double alpha, int n_samples,
                        std::uint64_t rng_seed);

// Evaluates the lower bound on lambda_min(L) and, when valid, the trace-based
// upper bound on ||L||.
BoundCheckResult check_appendix_b_bounds(const ProblemInstance& inst, const Matrix& K,
                                         double alpha);

// Constructs an eigenvalue-verified certificate for a supported direction H.
// Supported: the canonical 2x2 non-diagonalizable/complex forms, diagonal
// n>=3 directions with nonpositive entries not all equal, and diagonalizable
// H (n>=3) with distinct real nonpositive eigenvalues.
CounterexampleCertificate stable_direction_counterexample(const Matrix& H);

// Scans the rank-one perturbation family M + t*b*c' of the fixed companion
// matrix and returns (t1 stable, t2 > t1 unstable), each eigenvalue-verified.
std::pair<double, double> disconnected_t_set();

}  // namespace odc
