#pragma once

#include <map>
#include <string>
#include <vector>

#include "odc/local_search.hpp"

namespace odc {

enum class ScheduleDirection { increasing, decreasing, up_then_down, down_then_up };

struct DampingSchedule {
    std::vector<double> alphas;
    ScheduleDirection direction = ScheduleDirection::increasing;

    static DampingSchedule increasing(double from, double to, double step);
    static DampingSchedule decreasing(double from, double to, double step);
    // from -> peak -> from, peak value visited once.
    static DampingSchedule up_then_down(double from, double peak, double step);
    static DampingSchedule down_then_up(double from, double valley, double step);
};

struct TrajectoryPoint {
    double alpha;
    Controller K;
    double cost;
    double grad_norm;
    int iterations;
    double dist_to_best = 0.0;  // filled by track_bundle
};

enum class TrajectoryStatus { alive, lost, merged };

struct Trajectory {
    int id = 0;
    std::vector<TrajectoryPoint> points;
    TrajectoryStatus status = TrajectoryStatus::alive;
    // Valid when status == merged.
    int merged_into = -1;
    double merged_at_alpha = 0.0;
};

struct MergeEvent {
    double alpha;
    int survivor_id;
    int absorbed_id;
};

struct TrajectoryBundle {
    std::vector<Trajectory> trajectories;
    std::vector<MergeEvent> merge_events;
    std::map<int, int> best_id_per_step;  // schedule step index -> trajectory id
};

// Warm-started re-optimization along the schedule. start must be converged at
// the schedule's first alpha. On a decreasing step whose warm start
// destabilizes, one retry with half the alpha step is attempted before the
// trajectory is marked lost.
Trajectory track(const ProblemInstance& inst, const LocalSolution& start,
                 const DampingSchedule& schedule, const SolverConfig& cfg);

// Tracks every start in lockstep; after each alpha step, alive trajectories
// within merge_tol (Frobenius on K) merge, the lower-cost id surviving
// (tie: lower id). Records per-point distance to the best alive trajectory.
TrajectoryBundle track_bundle(const ProblemInstance& inst,
                              const std::vector<LocalSolution>& starts,
                              const DampingSchedule& schedule, const SolverConfig& cfg,
                              double merge_tol = 1e-2);

// Up-then-down sweep from start's alpha through alpha_peak and back.
Trajectory hysteresis(const ProblemInstance& inst, const LocalSolution& start,
                      double start_alpha, double alpha_peak, double step,
                      const SolverConfig& cfg);

struct ImproveResult {
    Controller K;
    double cost = 0.0;
    bool improved = false;  // false: decreasing leg was lost, K0 returned
};

// Damping round trip 0 -> alpha_peak -> 0 from K0 (stabilizing at alpha=0).
// Guarantees cost(result) <= cost(K0) whenever the return leg survives.
ImproveResult improve_by_damping(const ProblemInstance& inst, const Controller& K0,
                                 double alpha_peak, double step, const SolverConfig& cfg);

struct AnnealResult {
    Controller K;
    double cost = 0.0;
    bool success = false;
};

// Solve at a large alpha_start via multi_start, then track the solution down
// to alpha=0. May fail en route; failure is reported, never thrown.
AnnealResult anneal_from_damped(const ProblemInstance& inst, double alpha_start, double step,
                                const SolverConfig& cfg, std::uint64_t rng_seed,
                                int n_samples = 50);

}  // namespace odc
