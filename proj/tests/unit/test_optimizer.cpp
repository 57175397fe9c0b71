#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "declip/errors.hpp"
#include "declip/optimizer.hpp"
#include "declip/rng.hpp"
#include "support/oracles.hpp"

using namespace declip;

TEST_CASE("clip") {
  SUBCASE("rescales long gradients, preserves direction") {
    const Eigen::VectorXd clipped = clip(Eigen::Vector2d(3.0, 4.0), 2.5);
    CHECK((clipped - Eigen::Vector2d(1.5, 2.0)).norm() <= 1e-15);
  }
  SUBCASE("identity inside the ball") {
    const Eigen::VectorXd g = Eigen::Vector2d(1.0, 0.0);
    CHECK((clip(g, 5.0) - g).norm() == 0.0);
  }
  SUBCASE("zero gradient convention") {
    CHECK(clip(Eigen::Vector2d::Zero(), 1.0).norm() == 0.0);
  }
  SUBCASE("requires a positive level") {
    CHECK_THROWS_AS(clip(Eigen::Vector2d(1.0, 0.0), 0.0), Error);
  }
  SUBCASE("norm never exceeds min(||g||, tau)") {
    Rng rng(0xc11b);
    for (int trial = 0; trial < 2000; ++trial) {
      Eigen::VectorXd g(4);
      for (int d = 0; d < 4; ++d) g[d] = std::tan(3.1 * (rng.uniform01() - 0.5));
      const double tau = 0.01 + 5.0 * rng.uniform01();
      const double norm = clip(g, tau).norm();
      CHECK(norm <= std::min(g.norm(), tau) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("agent_step") {
  const auto omega = ConstraintSet::box(3, -1.0, 1.0);

  SUBCASE("no gradient, no noise: fixed point") {
    const Eigen::VectorXd v = Eigen::Vector3d(0.2, -0.5, 0.9);
    const Eigen::VectorXd out =
        agent_step(v, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), 0.7, 1.0, omega);
    CHECK((out - v).norm() == 0.0);
  }
  SUBCASE("oversized gradient is clipped then projected") {
    const double c0 = 0.575;
    Eigen::VectorXd grad = Eigen::Vector3d::Zero();
    grad[0] = 10.0 * c0;
    const double alpha = 0.1, tau = 2.0 * c0;
    const Eigen::VectorXd out =
        agent_step(Eigen::Vector3d::Zero(), grad, Eigen::Vector3d::Zero(), alpha, tau, omega);
    Eigen::VectorXd expected = Eigen::Vector3d::Zero();
    expected[0] = -alpha * tau;
    CHECK((out - omega.project(expected)).norm() <= 1e-15);
  }
  SUBCASE("pre-projection displacement bounded by alpha tau") {
    Rng rng(0xa9e);
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd v(3), grad(3), noise(3);
      for (int d = 0; d < 3; ++d) {
        v[d] = 2.0 * rng.uniform01() - 1.0;
        grad[d] = 10.0 * (rng.uniform01() - 0.5);
        noise[d] = std::tan(3.1 * (rng.uniform01() - 0.5));
      }
      const double alpha = rng.uniform01();
      const double tau = 0.1 + 3.0 * rng.uniform01();
      const Eigen::VectorXd out = agent_step(v, grad, noise, alpha, tau, omega);
      // projection is non-expansive around v in Omega
      CHECK((out - v).norm() <= alpha * tau * (1.0 + 1e-12) + 1e-15);
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(agent_step(Eigen::Vector3d::Zero(), Eigen::Vector2d::Zero(),
                               Eigen::Vector3d::Zero(), 0.1, 1.0, omega),
                    DimensionMismatch);
  }
}

TEST_CASE("validate_schedules closed forms") {
  const double c0 = 0.575;

  SUBCASE("remark pair passes everything") {
    SchedulePair s{1.0, 1.0, 2.0 * c0, 0.4, 1.5};
    const auto report = validate_schedules(s, c0);
    CHECK(report.all_pass);
    for (const auto& cond : report.conditions) CHECK(cond.pass);
  }
  SUBCASE("p = 0.5 breaks square summability") {
    SchedulePair s{1.0, 0.5, 2.0 * c0, 0.4, 1.5};
    const auto report = validate_schedules(s, c0);
    CHECK_FALSE(report.all_pass);
    CHECK_FALSE(report.conditions[0].pass);  // c1
    CHECK(report.conditions[1].pass);        // c2 unaffected
  }
  SUBCASE("constant tau breaks the bias series") {
    SchedulePair s{1.0, 1.0, 2.0 * c0, 0.0, 1.5};
    const auto report = validate_schedules(s, c0);
    CHECK_FALSE(report.all_pass);
    CHECK(report.conditions[0].pass);
    CHECK(report.conditions[1].pass);
    CHECK_FALSE(report.conditions[2].pass);  // p + (2d-2)q = 1, not > 1
  }
  SUBCASE("delta 1.2 with growing tau still passes") {
    // p + (2*1.2-2)*0.4 = 1.16 > 1: every series condition holds
    SchedulePair s{1.0, 1.0, 2.0 * c0, 0.4, 1.2};
    CHECK(validate_schedules(s, c0).all_pass);
  }
  SUBCASE("tau floor below 2 C0 fails c2") {
    SchedulePair s{1.0, 1.0, 1.9 * c0, 0.4, 1.5};
    const auto report = validate_schedules(s, c0);
    CHECK_FALSE(report.conditions[1].pass);
  }
  SUBCASE("alpha tau must vanish: p > q") {
    SchedulePair s{1.0, 0.9, 2.0 * c0, 0.95, 1.5};
    CHECK_FALSE(validate_schedules(s, c0).conditions[1].pass);
  }
  SUBCASE("structural violations throw") {
    CHECK_THROWS_AS(validate_schedules({0.0, 1.0, 1.0, 0.4, 1.5}, c0), ScheduleInvalid);
    CHECK_THROWS_AS(validate_schedules({1.0, 1.0, 1.0, -0.1, 1.5}, c0), ScheduleInvalid);
    CHECK_THROWS_AS(validate_schedules({1.0, 1.0, 1.0, 0.4, 1.0}, c0), ScheduleInvalid);
    CHECK_THROWS_AS(validate_schedules({1.0, 1.0, 1.0, 0.4, 2.5}, c0), ScheduleInvalid);
  }
}

namespace {

struct BiasCheck {
  double bias_norm;
  double bound;
  double se3;
};

// Monte-Carlo clipping bias at a fixed mixing point against (2 nu)^d tau^{1-d}
// with nu measured from the same draws.
BiasCheck measure_bias(const ProblemInstance& instance, double tau, double delta,
                       int n_draws, std::uint64_t seed) {
  const Eigen::VectorXd v = Eigen::VectorXd::Zero(instance.dim());
  const Eigen::VectorXd grad = instance.local_grad(0, v);
  const NoiseModel model = NoiseModel::shifted_pareto(instance.dim(), 2.0, 1.0);

  Rng rng(seed);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(instance.dim());
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(instance.dim());
  double moment = 0.0;
  for (int s = 0; s < n_draws; ++s) {
    const Eigen::VectorXd xi = sample_noise(model, rng);
    moment += std::pow(xi.norm(), delta);
    const Eigen::VectorXd b = clip(grad + xi, tau) - grad;
    sum += b;
    sum_sq += b.cwiseProduct(b);
  }
  const double n = static_cast<double>(n_draws);
  const Eigen::VectorXd mean = sum / n;
  const Eigen::VectorXd var = sum_sq / n - mean.cwiseProduct(mean);
  const double se = std::sqrt(var.sum() / n);
  const double nu = std::pow(moment / n, 1.0 / delta);

  return {mean.norm(), std::pow(2.0 * nu, delta) * std::pow(tau, 1.0 - delta), 3.0 * se};
}

}  // namespace

TEST_CASE("clipping bias stays under the moment bound") {
  const auto [instance, graph] = build_paper_instance();
  const double c0 = gradient_bound(instance);
  for (double factor : {2.0, 10.0}) {
    const BiasCheck check = measure_bias(instance, factor * c0, 1.5, 200'000, 0xb1a5);
    CHECK(check.bias_norm <= check.bound + check.se3);
  }
}

namespace {

RunOptions base_options(long iterations, std::uint64_t seed) {
  RunOptions options;
  options.iterations = iterations;
  options.seed = seed;
  options.stride = 10;
  return options;
}

}  // namespace

TEST_CASE("run") {
  const auto [instance, graph] = build_paper_instance();
  const auto oracle = solve_centralized(instance, 1e-10);
  const ReferenceSolution reference{oracle.theta_star, oracle.f_star};
  const SchedulePair paper_schedules{10.0, 1.0, 10.0, 0.4, 1.5};

  SUBCASE("noise-free run decays toward theta*") {
    RunOptions options = base_options(20'000, 0);
    const RunTrace trace = run(instance, graph, NoiseModel::zero(6), paper_schedules,
                               reference, options);
    REQUIRE(!trace.records.empty());
    CHECK_FALSE(trace.diverged);
    CHECK(trace.records.back().dist_to_opt < 0.01);
    CHECK(trace.records.back().dist_to_opt < trace.records.front().dist_to_opt / 50.0);
    CHECK(trace.records.back().consensus_err < 0.01);
  }

  SUBCASE("states stay feasible under heavy-tailed noise") {
    RunOptions options = base_options(2'000, 0x7ea5);
    options.record_states = true;
    const RunTrace trace = run(instance, graph, NoiseModel::shifted_pareto(6, 2.0, 1.0),
                               paper_schedules, reference, options);
    CHECK_FALSE(trace.diverged);
    for (const auto& snapshot : trace.state_history) {
      for (const auto& x : snapshot) CHECK(instance.omega().contains(x, 0.0));
    }
    for (const auto& rec : trace.records) {
      CHECK(rec.dist_to_opt >= 0.0);
      CHECK(rec.consensus_err >= 0.0);
      CHECK(rec.subopt_gap >= 0.0);
    }
  }

  SUBCASE("identical seeds reproduce the trace bit for bit") {
    RunOptions options = base_options(1'500, 0xd5);
    const RunTrace a = run(instance, graph, NoiseModel::shifted_pareto(6, 2.0, 1.0),
                           paper_schedules, reference, options);
    const RunTrace b = run(instance, graph, NoiseModel::shifted_pareto(6, 2.0, 1.0),
                           paper_schedules, reference, options);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t r = 0; r < a.records.size(); ++r) {
      CHECK(a.records[r].dist_to_opt == b.records[r].dist_to_opt);
      CHECK(a.records[r].consensus_err == b.records[r].consensus_err);
      CHECK(a.records[r].subopt_gap == b.records[r].subopt_gap);
    }
    for (int i = 0; i < 6; ++i) {
      CHECK((a.final_states[size_t(i)] - b.final_states[size_t(i)]).norm() == 0.0);
    }
  }

  SUBCASE("mean-state update identity holds to 1e-12") {
    RunOptions options = base_options(1'000, 0x1d);
    options.check_average_identity = true;
    const RunTrace trace = run(instance, graph, NoiseModel::shifted_pareto(6, 2.0, 1.0),
                               paper_schedules, reference, options);
    CHECK(trace.max_average_drift <= 1e-12);
  }

  SUBCASE("single-agent degeneration equals centralized projected gradient") {
    // One agent, trivial graph: the update must match x <- P[x - a_k grad f]
    LogisticRidgeData data;
    data.labels = {1};
    data.features = {Eigen::Vector2d(0.8, -0.4)};
    data.mu_ridge = 1.0;
    auto single = ProblemInstance::logistic_ridge(data, ConstraintSet::box(2, -1.0, 1.0));
    const auto single_oracle = solve_centralized(single, 1e-12);

    RunOptions options = base_options(300, 0);
    options.stride = 1;
    options.record_states = true;
    const RunTrace trace = run(single, AdjacencyMatrix::trivial(), NoiseModel::zero(2),
                               paper_schedules, {single_oracle.theta_star, single_oracle.f_star},
                               options);

    Eigen::VectorXd x = Eigen::Vector2d::Zero();
    for (long k = 0; k < 300; ++k) {
      const Eigen::VectorXd g = local_gradient(data, 0, x);
      const Eigen::VectorXd hat = clip(g, paper_schedules.tau(k));
      x = single.omega().project(x - paper_schedules.alpha(k) * hat);
      CHECK((trace.state_history[static_cast<std::size_t>(k)][0] - x).norm() == 0.0);
    }
  }

  SUBCASE("divergent gradient marks the trace, does not throw") {
    std::vector<ProblemInstance::Value> values{[](const Eigen::VectorXd&) { return 0.0; }};
    std::vector<ProblemInstance::Gradient> grads{[](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Constant(1, std::numeric_limits<double>::quiet_NaN());
    }};
    ProblemInstance bad(std::move(values), std::move(grads),
                        ConstraintSet::box(1, -1.0, 1.0), 1, 1.0);
    RunOptions options = base_options(100, 0);
    const RunTrace trace = run(bad, AdjacencyMatrix::trivial(), NoiseModel::zero(1),
                               {1.0, 1.0, 1.0, 0.0, 1.5},
                               {Eigen::VectorXd::Zero(1), 0.0}, options);
    CHECK(trace.diverged);
    CHECK(trace.diverged_at == 1);
    CHECK(trace.records.empty());
  }

  SUBCASE("record count is ceil(T / stride)") {
    RunOptions options = base_options(100, 0);
    const RunTrace trace = run(instance, graph, NoiseModel::zero(6), paper_schedules,
                               reference, options);
    CHECK(trace.records.size() == 10);
    CHECK(trace.records.front().k == 10);
    CHECK(trace.records.back().k == 100);

    options.iterations = 105;
    const RunTrace uneven = run(instance, graph, NoiseModel::zero(6), paper_schedules,
                                reference, options);
    CHECK(uneven.records.size() == 11);
    CHECK(uneven.records.back().k == 105);
  }
}
