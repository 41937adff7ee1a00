#include "odc/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace odc {

namespace {

std::vector<double> grid(double from, double to, double step) {
    if (step <= 0.0) throw PreconditionError("DampingSchedule: step must be > 0");
    std::vector<double> out;
    int n = static_cast<int>(std::llround(std::abs(to - from) / step));
    double dir = to >= from ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) out.push_back(from + dir * i * step);
    out.push_back(to);  // land exactly on the endpoint
    return out;
}

}  // namespace

DampingSchedule DampingSchedule::increasing(double from, double to, double step) {
    if (to <= from) throw PreconditionError("DampingSchedule::increasing: to must exceed from");
    return {grid(from, to, step), ScheduleDirection::increasing};
}

DampingSchedule DampingSchedule::decreasing(double from, double to, double step) {
    if (to >= from) throw PreconditionError("DampingSchedule::decreasing: to must be below from");
    return {grid(from, to, step), ScheduleDirection::decreasing};
}

DampingSchedule DampingSchedule::up_then_down(double from, double peak, double step) {
    if (peak == from) return {{from, from}, ScheduleDirection::up_then_down};
    std::vector<double> up = grid(from, peak, step);
    std::vector<double> down = grid(peak, from, step);
    up.insert(up.end(), down.begin() + 1, down.end());
    return {std::move(up), ScheduleDirection::up_then_down};
}

DampingSchedule DampingSchedule::down_then_up(double from, double valley, double step) {
    if (valley == from) return {{from, from}, ScheduleDirection::down_then_up};
    std::vector<double> down = grid(from, valley, step);
    std::vector<double> up = grid(valley, from, step);
    down.insert(down.end(), up.begin() + 1, up.end());
    return {std::move(down), ScheduleDirection::down_then_up};
}

namespace {

TrajectoryPoint make_point(double alpha, const LocalSolution& sol) {
    return {alpha, sol.K, sol.cost, sol.grad_norm, sol.iterations, 0.0};
}

// Advances one trajectory from (K at prev_alpha) to alpha. Returns false when
// the trajectory is lost (destabilized warm start or solver stall).
bool advance(const ProblemInstance& inst, Matrix& K, double prev_alpha, double alpha,
             const SolverConfig& cfg, LocalSolution& out) {
    Matrix warm = K;
    if (!is_stabilizing(inst, warm, alpha, cfg.stability_tol)) {
        // One retry through the midpoint; only decreasing steps can get here
        // (increasing damping preserves stability).
        double mid = 0.5 * (prev_alpha + alpha);
        if (!is_stabilizing(inst, warm, mid, cfg.stability_tol)) return false;
        LocalSolution at_mid = minimize(inst, Controller(warm), mid, cfg);
        if (at_mid.status != SolveStatus::converged) return false;
        warm = at_mid.K.K;
        if (!is_stabilizing(inst, warm, alpha, cfg.stability_tol)) return false;
    }
    out = minimize(inst, Controller(warm), alpha, cfg);
    if (out.status != SolveStatus::converged) return false;
    K = out.K.K;
    return true;
}

}  // namespace

Trajectory track(const ProblemInstance& inst, const LocalSolution& start,
                 const DampingSchedule& schedule, const SolverConfig& cfg) {
    if (schedule.alphas.empty()) throw PreconditionError("track: empty schedule");
    if (start.status != SolveStatus::converged) {
        throw PreconditionError("track: start must be a converged solution");
    }
    Trajectory traj;
    traj.points.push_back(make_point(schedule.alphas.front(), start));
    Matrix K = start.K.K;
    for (std::size_t i = 1; i < schedule.alphas.size(); ++i) {
        LocalSolution sol;
        if (!advance(inst, K, schedule.alphas[i - 1], schedule.alphas[i], cfg, sol)) {
            traj.status = TrajectoryStatus::lost;
            return traj;
        }
        traj.points.push_back(make_point(schedule.alphas[i], sol));
    }
    return traj;
}

TrajectoryBundle track_bundle(const ProblemInstance& inst,
                              const std::vector<LocalSolution>& starts,
                              const DampingSchedule& schedule, const SolverConfig& cfg,
                              double merge_tol) {
    if (schedule.alphas.empty()) throw PreconditionError("track_bundle: empty schedule");
    for (const auto& s : starts) {
        if (s.status != SolveStatus::converged) {
            throw PreconditionError("track_bundle: all starts must be converged");
        }
    }

    // Canonical ordering makes the output independent of input order.
    std::vector<LocalSolution> sorted = starts;
    std::sort(sorted.begin(), sorted.end(), [](const LocalSolution& a, const LocalSolution& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        for (Eigen::Index i = 0; i < a.K.K.size(); ++i) {
            if (a.K.K.data()[i] != b.K.K.data()[i]) return a.K.K.data()[i] < b.K.K.data()[i];
        }
        return false;
    });

    TrajectoryBundle bundle;
    std::vector<Matrix> current(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        Trajectory t;
        t.id = static_cast<int>(i);
        t.points.push_back(make_point(schedule.alphas.front(), sorted[i]));
        bundle.trajectories.push_back(std::move(t));
        current[i] = sorted[i].K.K;
    }

    auto merge_pass = [&](double alpha) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t a = 0; a < bundle.trajectories.size() && !changed; ++a) {
                if (bundle.trajectories[a].status != TrajectoryStatus::alive) continue;
                for (std::size_t b = a + 1; b < bundle.trajectories.size() && !changed; ++b) {
                    if (bundle.trajectories[b].status != TrajectoryStatus::alive) continue;
                    if ((current[a] - current[b]).norm() > merge_tol) continue;
                    double cost_a = bundle.trajectories[a].points.back().cost;
                    double cost_b = bundle.trajectories[b].points.back().cost;
                    // Lower cost survives; costs within solver tolerance count
                    // as a tie and resolve to the lower id (ids are
                    // cost-ordered at the start).
                    double tie_tol = 1e-8 * (1.0 + std::abs(cost_a));
                    std::size_t survivor = (cost_b < cost_a - tie_tol) ? b : a;
                    std::size_t absorbed = (survivor == a) ? b : a;
                    bundle.trajectories[absorbed].status = TrajectoryStatus::merged;
                    bundle.trajectories[absorbed].merged_into = bundle.trajectories[survivor].id;
                    bundle.trajectories[absorbed].merged_at_alpha = alpha;
                    bundle.merge_events.push_back(
                        {alpha, bundle.trajectories[survivor].id, bundle.trajectories[absorbed].id});
                    changed = true;
                }
            }
        }
    };

    auto record_best = [&](std::size_t step_index) {
        int best_id = -1;
        double best_cost = 0.0;
        const Matrix* best_k = nullptr;
        for (std::size_t i = 0; i < bundle.trajectories.size(); ++i) {
            auto& t = bundle.trajectories[i];
            if (t.status != TrajectoryStatus::alive) continue;
            double c = t.points.back().cost;
            if (best_id < 0 || c < best_cost) {
                best_id = t.id;
                best_cost = c;
                best_k = &current[i];
            }
        }
        if (best_id < 0) return;
        bundle.best_id_per_step[static_cast<int>(step_index)] = best_id;
        for (std::size_t i = 0; i < bundle.trajectories.size(); ++i) {
            auto& t = bundle.trajectories[i];
            if (t.status != TrajectoryStatus::alive) continue;
            t.points.back().dist_to_best = (current[i] - *best_k).norm();
        }
    };

    merge_pass(schedule.alphas.front());
    record_best(0);

    for (std::size_t si = 1; si < schedule.alphas.size(); ++si) {
        double alpha = schedule.alphas[si];
        for (std::size_t i = 0; i < bundle.trajectories.size(); ++i) {
            auto& t = bundle.trajectories[i];
            if (t.status != TrajectoryStatus::alive) continue;
            LocalSolution sol;
            if (!advance(inst, current[i], schedule.alphas[si - 1], alpha, cfg, sol)) {
                t.status = TrajectoryStatus::lost;
                continue;
            }
            t.points.push_back(make_point(alpha, sol));
        }
        merge_pass(alpha);
        record_best(si);
    }
    return bundle;
}

Trajectory hysteresis(const ProblemInstance& inst, const LocalSolution& start,
                      double start_alpha, double alpha_peak, double step,
                      const SolverConfig& cfg) {
    DampingSchedule schedule = alpha_peak >= start_alpha
                                   ? DampingSchedule::up_then_down(start_alpha, alpha_peak, step)
                                   : DampingSchedule::down_then_up(start_alpha, alpha_peak, step);
    return track(inst, start, schedule, cfg);
}

ImproveResult improve_by_damping(const ProblemInstance& inst, const Controller& K0,
                                 double alpha_peak, double step, const SolverConfig& cfg) {
    if (!is_stabilizing(inst, K0.K, 0.0, cfg.stability_tol)) {
        throw PreconditionError("improve_by_damping: K0 must be stabilizing at alpha = 0");
    }
    double cost0 = cost(inst, K0.K, 0.0);

    ImproveResult result;
    result.K = K0;
    result.cost = cost0;

    LocalSolution start = minimize(inst, K0, 0.0, cfg);
    if (start.status != SolveStatus::converged) return result;
    if (start.cost < result.cost) {
        result.K = start.K;
        result.cost = start.cost;
        result.improved = true;
    }

    Trajectory loop = hysteresis(inst, start, 0.0, alpha_peak, step, cfg);
    if (loop.status == TrajectoryStatus::alive && !loop.points.empty() &&
        loop.points.back().alpha == 0.0) {
        const TrajectoryPoint& end = loop.points.back();
        if (end.cost < result.cost) {
            result.K = end.K;
            result.cost = end.cost;
            result.improved = end.cost < cost0;
        }
    }
    return result;
}

AnnealResult anneal_from_damped(const ProblemInstance& inst, double alpha_start, double step,
                                const SolverConfig& cfg, std::uint64_t rng_seed, int n_samples) {
    AnnealResult result;
    auto solutions = multi_start(inst, alpha_start, n_samples, rng_seed, cfg);
    if (solutions.empty()) return result;

    DampingSchedule down = DampingSchedule::decreasing(alpha_start, 0.0, step);
    Trajectory traj = track(inst, solutions.front(), down, cfg);
    const TrajectoryPoint& last = traj.points.back();
    result.K = last.K;
    result.cost = last.cost;
    result.success = traj.status == TrajectoryStatus::alive && last.alpha == 0.0;
    return result;
}

}  // namespace odc
