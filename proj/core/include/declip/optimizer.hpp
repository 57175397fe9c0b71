#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "declip/constraint.hpp"
#include "declip/graph.hpp"
#include "declip/noise.hpp"
#include "declip/problem.hpp"
#include "declip/schedule.hpp"

namespace declip {

// Rescales g to norm at most tau, keeping its direction:
// min{1, tau/||g||} g, with the zero gradient passed through unchanged.
Eigen::VectorXd clip(const Eigen::VectorXd& g, double tau);

// One-agent update: P_Omega[v - alpha * clip(grad + noise, tau)].
// The pre-projection displacement is bounded by alpha * tau.
Eigen::VectorXd agent_step(const Eigen::VectorXd& v, const Eigen::VectorXd& grad,
                           const Eigen::VectorXd& noise, double alpha, double tau,
                           const ConstraintSet& omega);

// Optimum reference the trace metrics are measured against.
struct ReferenceSolution {
  Eigen::VectorXd theta_star;
  double f_star = 0.0;
};

struct TraceRecord {
  long k = 0;                  // iterations applied so far
  double dist_to_opt = 0.0;    // sum_i ||x_i - theta*||
  double consensus_err = 0.0;  // sum_i ||x_i - mean_j x_j||
  double subopt_gap = 0.0;     // f(mean state) - f(theta*)
};

struct RunOptions {
  long iterations = 10'000;
  std::uint64_t seed = 0;
  bool clipping = true;
  int stride = 10;
  bool record_states = false;          // keep per-record agent states
  bool check_average_identity = false; // track the mean-state update identity
  std::optional<std::vector<Eigen::VectorXd>> initial_states;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<Eigen::VectorXd> final_states;
  std::uint64_t seed = 0;
  bool clipping = true;
  bool diverged = false;
  long diverged_at = -1;
  // filled when the corresponding RunOptions flags are set
  std::vector<std::vector<Eigen::VectorXd>> state_history;
  double max_average_drift = 0.0;
};

// Runs T iterations of the clipped distributed stochastic subgradient
// projection update (plain subgradient projection when clipping is off):
// mix neighbor states, add fresh per-agent noise to the local gradient,
// clip, step, project. Agent g gets its own generator derived from the run
// seed, so a seed pins the whole noise tableau.
//
// Non-finite states mark the trace as diverged and truncate it; they do not
// throw. Structurally invalid schedules throw ScheduleInvalid.
RunTrace run(const ProblemInstance& instance, const AdjacencyMatrix& graph,
             const NoiseModel& noise_model, const SchedulePair& schedules,
             const ReferenceSolution& reference, const RunOptions& options);

}  // namespace declip
