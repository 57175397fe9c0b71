#include "declip/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "declip/errors.hpp"
#include "declip/rng.hpp"

namespace declip {

Eigen::VectorXd clip(const Eigen::VectorXd& g, double tau) {
  if (!(tau > 0.0)) throw Error("clip level must be positive");
  const double norm = g.norm();
  if (norm <= tau) return g;  // includes ||g|| = 0
  return (tau / norm) * g;
}

Eigen::VectorXd agent_step(const Eigen::VectorXd& v, const Eigen::VectorXd& grad,
                           const Eigen::VectorXd& noise, double alpha, double tau,
                           const ConstraintSet& omega) {
  if (grad.size() != v.size() || noise.size() != v.size()) {
    throw DimensionMismatch("agent_step: vector dimensions differ");
  }
  return omega.project(v - alpha * clip(grad + noise, tau));
}

namespace {

double sum_distance(const std::vector<Eigen::VectorXd>& states,
                    const Eigen::VectorXd& point) {
  double total = 0.0;
  for (const auto& x : states) total += (x - point).norm();
  return total;
}

Eigen::VectorXd mean_state(const std::vector<Eigen::VectorXd>& states) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(states.front().size());
  for (const auto& x : states) mean += x;
  return mean / static_cast<double>(states.size());
}

}  // namespace

RunTrace run(const ProblemInstance& instance, const AdjacencyMatrix& graph,
             const NoiseModel& noise_model, const SchedulePair& schedules,
             const ReferenceSolution& reference, const RunOptions& options) {
  schedules.check_structure();
  if (options.iterations < 1) throw Error("run needs at least one iteration");
  if (options.stride < 1) throw Error("recording stride must be >= 1");
  const int n = instance.n_agents();
  if (graph.n() != n) throw DimensionMismatch("graph/instance agent counts differ");
  if (noise_model.dim != instance.dim()) {
    throw DimensionMismatch("noise/instance dimensions differ");
  }
  if (reference.theta_star.size() != instance.dim()) {
    throw DimensionMismatch("reference dimension differs from the instance");
  }

  const auto& omega = instance.omega();
  std::vector<Eigen::VectorXd> states;
  if (options.initial_states) {
    if (static_cast<int>(options.initial_states->size()) != n) {
      throw DimensionMismatch("initial state count differs from agent count");
    }
    states.reserve(static_cast<std::size_t>(n));
    for (const auto& x : *options.initial_states) states.push_back(omega.project(x));
  } else {
    states.assign(static_cast<std::size_t>(n),
                  omega.project(Eigen::VectorXd::Zero(instance.dim())));
  }

  std::vector<Rng> agent_rng;
  agent_rng.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) agent_rng.emplace_back(derive_seed(options.seed, static_cast<std::uint64_t>(i)));

  RunTrace trace;
  trace.seed = options.seed;
  trace.clipping = options.clipping;
  const long total = options.iterations;
  trace.records.reserve(static_cast<std::size_t>(total / options.stride + 2));

  auto record = [&](long k_done) {
    TraceRecord rec;
    rec.k = k_done;
    rec.dist_to_opt = sum_distance(states, reference.theta_star);
    const Eigen::VectorXd mean = mean_state(states);
    rec.consensus_err = sum_distance(states, mean);
    rec.subopt_gap = std::max(0.0, global_objective(instance, mean) - reference.f_star);
    trace.records.push_back(rec);
    if (options.record_states) trace.state_history.push_back(states);
  };

  Eigen::VectorXd prev_mean;
  if (options.check_average_identity) prev_mean = mean_state(states);

  for (long k = 0; k < total; ++k) {
    const double alpha = schedules.alpha(k);
    const double tau = schedules.tau(k);
    const std::vector<Eigen::VectorXd> mixed = mix(graph, states);

    Eigen::VectorXd displacement_sum;
    if (options.check_average_identity) {
      displacement_sum = Eigen::VectorXd::Zero(instance.dim());
    }

    bool finite = true;
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const Eigen::VectorXd grad = instance.local_grad(i, mixed[idx]);
      const Eigen::VectorXd xi = sample_noise(noise_model, agent_rng[idx]);
      const Eigen::VectorXd g = grad + xi;
      const Eigen::VectorXd step = options.clipping ? clip(g, tau) : g;
      const Eigen::VectorXd candidate = mixed[idx] - alpha * step;
      if (!candidate.allFinite()) {
        finite = false;
        break;
      }
      Eigen::VectorXd next = omega.project(candidate);
      if (options.check_average_identity) displacement_sum += next - mixed[idx];
      states[idx] = std::move(next);
    }

    if (!finite) {
      trace.diverged = true;
      trace.diverged_at = k + 1;
      break;
    }

    if (options.check_average_identity) {
      const Eigen::VectorXd mean = mean_state(states);
      const double drift =
          (mean - prev_mean - displacement_sum / static_cast<double>(n)).norm();
      trace.max_average_drift = std::max(trace.max_average_drift, drift);
      prev_mean = mean;
    }

    const long done = k + 1;
    if (done % options.stride == 0 || done == total) record(done);
  }

  trace.final_states = states;
  return trace;
}

}  // namespace declip
