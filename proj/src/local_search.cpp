#include "odc/local_search.hpp"

#include <algorithm>
#include <random>

namespace odc {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::iteration_cap: return "iteration_cap";
        case SolveStatus::line_search_stall: return "line_search_stall";
    }
    return "unknown";
}

std::optional<double> armijo_step(const ProblemInstance& inst, const Matrix& K,
                                  const Matrix& direction, double alpha,
                                  const LineSearchParams& params, double current_cost,
                                  const Matrix& grad, double stability_tol) {
    double slope = grad.cwiseProduct(direction).sum();
    if (slope >= 0.0) {
        throw PreconditionError("armijo_step: direction is not a descent direction");
    }
    double s = params.initial_step;
    for (int i = 0; i <= params.max_backtracks; ++i, s *= params.shrink) {
        Matrix trial = K + s * direction;
        if (!is_stabilizing(inst, trial, alpha, stability_tol)) continue;
        if (cost(inst, trial, alpha) < current_cost + params.armijo_c * s * slope) {
            return s;
        }
    }
    return std::nullopt;
}

LocalSolution minimize(const ProblemInstance& inst, const Controller& K0, double alpha,
                       const SolverConfig& cfg) {
    if (!inst.mask.is_feasible(K0.K)) {
        throw PreconditionError("minimize: K0 violates the sparsity mask");
    }
    if (!is_stabilizing(inst, K0.K, alpha, cfg.stability_tol)) {
        throw PreconditionError("minimize: K0 is not stabilizing at this damping level");
    }

    Matrix K = K0.K;
    Evaluation ev = evaluate(inst, K, alpha);

    LocalSolution sol;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        double gnorm = ev.projected_gradient.norm();
        if (gnorm <= cfg.grad_tol) {
            sol.status = SolveStatus::converged;
            sol.iterations = iter;
            sol.K = Controller(K);
            sol.cost = ev.cost;
            sol.grad_norm = gnorm;
            return sol;
        }
        Matrix dir = -ev.projected_gradient;
        auto step = armijo_step(inst, K, dir, alpha, cfg.line_search, ev.cost,
                                ev.projected_gradient, cfg.stability_tol);
        if (!step) {
            sol.status = SolveStatus::line_search_stall;
            sol.iterations = iter;
            sol.K = Controller(K);
            sol.cost = ev.cost;
            sol.grad_norm = gnorm;
            return sol;
        }
        K += *step * dir;
        ev = evaluate(inst, K, alpha);
    }
    sol.status = SolveStatus::iteration_cap;
    sol.iterations = cfg.max_iters;
    sol.K = Controller(K);
    sol.cost = ev.cost;
    sol.grad_norm = ev.projected_gradient.norm();
    return sol;
}

namespace {

bool lex_less(const Matrix& a, const Matrix& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a.data()[i] != b.data()[i]) return a.data()[i] < b.data()[i];
    }
    return false;
}

}  // namespace

std::vector<LocalSolution> multi_start(const ProblemInstance& inst, double alpha,
                                       int n_samples, std::uint64_t rng_seed,
                                       const SolverConfig& cfg, double dedup_tol) {
    if (n_samples < 1) {
        throw PreconditionError("multi_start: n_samples must be >= 1");
    }
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<LocalSolution> converged;
    for (int s = 0; s < n_samples; ++s) {
        Matrix K = Matrix::Zero(inst.m(), inst.n());
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            for (Eigen::Index i = 0; i < K.rows(); ++i) {
                if (inst.mask.indicator(i, j) != 0.0) K(i, j) = normal(rng);
            }
        }
        if (!is_stabilizing(inst, K, alpha, cfg.stability_tol)) continue;
        LocalSolution sol = minimize(inst, Controller(K), alpha, cfg);
        if (sol.status == SolveStatus::converged) converged.push_back(std::move(sol));
    }

    std::sort(converged.begin(), converged.end(), [](const LocalSolution& a, const LocalSolution& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return lex_less(a.K.K, b.K.K);
    });

    // Cluster: a solution joins the first existing cluster whose representative
    // is within dedup_tol in K, with a secondary relative cost gap check.
    std::vector<LocalSolution> clusters;
    for (auto& sol : converged) {
        bool duplicate = false;
        for (const auto& rep : clusters) {
            bool close_k = (sol.K.K - rep.K.K).norm() <= dedup_tol;
            bool close_cost = std::abs(sol.cost - rep.cost) <= 1e-4 * (1.0 + std::abs(rep.cost));
            if (close_k || (close_cost && (sol.K.K - rep.K.K).norm() <= 10.0 * dedup_tol)) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) clusters.push_back(std::move(sol));
    }
    return clusters;
}

}  // namespace odc
