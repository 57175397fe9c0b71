#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "declip/constraint.hpp"
#include "declip/errors.hpp"
#include "declip/problem.hpp"
#include "declip/rng.hpp"
#include "support/oracles.hpp"

using namespace declip;

namespace {

Eigen::VectorXd random_box_point(Rng& rng, int dim, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd x(dim);
  for (int d = 0; d < dim; ++d) x[d] = lo + (hi - lo) * rng.uniform01();
  return x;
}

// Single-agent quadratic instance ||theta - center||^2 on a box.
ProblemInstance quadratic_instance(const Eigen::VectorXd& center, double lo, double hi) {
  const int dim = static_cast<int>(center.size());
  std::vector<ProblemInstance::Value> values{[center](const Eigen::VectorXd& t) {
    return (t - center).squaredNorm();
  }};
  std::vector<ProblemInstance::Gradient> grads{[center](const Eigen::VectorXd& t) {
    return Eigen::VectorXd(2.0 * (t - center));
  }};
  ProblemInstance inst(std::move(values), std::move(grads),
                       ConstraintSet::box(dim, lo, hi), dim, 1.0);
  inst.set_lipschitz_bound(2.0);
  const double reach = std::max(std::abs(lo), std::abs(hi)) * std::sqrt(double(dim)) +
                       center.norm();
  inst.set_certified_gradient_bound(2.0 * reach);
  return inst;
}

}  // namespace

TEST_CASE("projection") {
  SUBCASE("box clamp") {
    const auto omega = ConstraintSet::box(6, -1.0, 1.0);
    Eigen::VectorXd x(6);
    x << 1.5, -0.2, 0, 0, 0, 0;
    Eigen::VectorXd expected(6);
    expected << 1.0, -0.2, 0, 0, 0, 0;
    CHECK((omega.project(x) - expected).norm() <= 1e-15);
  }
  SUBCASE("ball radial rescale") {
    const auto omega = ConstraintSet::ball(Eigen::VectorXd::Zero(2), 1.0);
    const Eigen::VectorXd p = omega.project(Eigen::Vector2d(3.0, 4.0));
    CHECK((p - Eigen::Vector2d(0.6, 0.8)).norm() <= 1e-15);
  }
  SUBCASE("interior points unchanged") {
    const auto box = ConstraintSet::box(3, -1.0, 1.0);
    const auto ball = ConstraintSet::ball(Eigen::VectorXd::Zero(3), 2.0);
    const Eigen::VectorXd x = Eigen::Vector3d(0.3, -0.9, 0.0);
    CHECK((box.project(x) - x).norm() == 0.0);
    CHECK((ball.project(x) - x).norm() == 0.0);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(ConstraintSet::box(3, -1.0, 1.0).project(Eigen::Vector2d(0, 0)),
                    DimensionMismatch);
  }
  SUBCASE("idempotent and non-expansive on random pairs") {
    Rng rng(0x5150);
    const auto box = ConstraintSet::box(5, -0.8, 1.2);
    const auto ball = ConstraintSet::ball(random_box_point(rng, 5), 0.9);
    for (const auto* omega : {&box, &ball}) {
      for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::VectorXd x = 3.0 * random_box_point(rng, 5);
        const Eigen::VectorXd y = 3.0 * random_box_point(rng, 5);
        const Eigen::VectorXd px = omega->project(x);
        CHECK((omega->project(px) - px).norm() <= 1e-12);
        CHECK((px - omega->project(y)).norm() <= (x - y).norm() + 1e-12);
      }
    }
  }
}

TEST_CASE("local_gradient closed forms") {
  const auto [instance, graph] = build_paper_instance();
  const auto& data = *instance.logistic_data();

  SUBCASE("zero point gives -q/12") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);
    for (int i = 0; i < 6; ++i) {
      const Eigen::VectorXd expected =
          -data.labels[size_t(i)] / 12.0 * data.features[size_t(i)];
      CHECK((local_gradient(data, i, zero) - expected).norm() <= 1e-15);
    }
    const Eigen::VectorXd g1 = local_gradient(data, 0, zero);
    CHECK(g1[0] == doctest::Approx(-0.0385).epsilon(1e-3));
    CHECK(g1[1] == doctest::Approx(-0.0665).epsilon(1e-3));
    CHECK(g1[2] == doctest::Approx(0.0));
    CHECK(g1[3] == doctest::Approx(-0.0279).epsilon(2e-3));
    CHECK(g1[4] == doctest::Approx(-0.0136).epsilon(2e-3));
    CHECK(g1[5] == doctest::Approx(-0.0085).epsilon(1e-3));
  }

  SUBCASE("matches central finite differences on random interior points") {
    Rng rng(0xfd);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd theta = 0.99 * random_box_point(rng, 6);
      for (int i = 0; i < 6; ++i) {
        const Eigen::VectorXd numeric = testsupport::finite_difference_gradient(
            [&](const Eigen::VectorXd& t) { return logistic_ridge_value(data, i, t); },
            theta);
        const Eigen::VectorXd analytic = local_gradient(data, i, theta);
        CHECK((numeric - analytic).norm() <=
              1e-6 * std::max(1.0, analytic.norm()));
      }
    }
  }

  SUBCASE("stable at extreme margins") {
    LogisticRidgeData wide;
    wide.labels = {1};
    wide.features = {Eigen::VectorXd::Constant(1, 700.0)};
    wide.mu_ridge = 1.0;
    const Eigen::VectorXd far = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(std::isfinite(local_gradient(wide, 0, far)[0]));
    CHECK(std::isfinite(logistic_ridge_value(wide, 0, far)));
    CHECK(std::isfinite(local_gradient(wide, 0, -far)[0]));
    CHECK(std::isfinite(logistic_ridge_value(wide, 0, -far)));
  }
}

TEST_CASE("strong convexity surrogate of the ridge term") {
  const auto [instance, graph] = build_paper_instance();
  const auto& data = *instance.logistic_data();
  CHECK(instance.mu_modulus() == doctest::Approx(data.mu_ridge / 12.0));

  Rng rng(0x5c);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd z1 = random_box_point(rng, 6);
    const Eigen::VectorXd z2 = random_box_point(rng, 6);
    const int i = static_cast<int>(rng.uniform01() * 6);
    const double gap = logistic_ridge_value(data, i, z2) - logistic_ridge_value(data, i, z1) -
                       local_gradient(data, i, z1).dot(z2 - z1);
    CHECK(gap >= (instance.mu_modulus() - 1e-9) * (z2 - z1).squaredNorm());
  }
}

TEST_CASE("gradient_bound") {
  SUBCASE("pure logistic with unit-norm scaled feature") {
    LogisticRidgeData data;
    data.labels = {1};
    Eigen::VectorXd q = Eigen::VectorXd::Zero(6);
    q[0] = 6.0;
    data.features = {q};
    data.mu_ridge = 0.0;
    const auto inst = ProblemInstance::logistic_ridge(data, ConstraintSet::box(6, -1, 1));
    CHECK(gradient_bound(inst) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("reference instance value and empirical domination") {
    const auto [instance, graph] = build_paper_instance();
    const double c0 = gradient_bound(instance);
    CHECK(c0 == doctest::Approx(0.5749579515849603).epsilon(1e-12));

    Rng rng(0xc0);
    double empirical = 0.0;
    for (int s = 0; s < 10'000; ++s) {
      const Eigen::VectorXd theta = random_box_point(rng, 6);
      for (int i = 0; i < 6; ++i) {
        empirical = std::max(empirical, instance.local_grad(i, theta).norm());
      }
    }
    CHECK(empirical <= c0);
  }
  SUBCASE("no certificate -> Unbounded") {
    std::vector<ProblemInstance::Value> values{[](const Eigen::VectorXd& t) {
      return t.squaredNorm();
    }};
    std::vector<ProblemInstance::Gradient> grads{[](const Eigen::VectorXd& t) {
      return Eigen::VectorXd(2.0 * t);
    }};
    ProblemInstance inst(std::move(values), std::move(grads),
                         ConstraintSet::box(2, -1.0, 1.0), 2, 1.0);
    CHECK_THROWS_AS(gradient_bound(inst), Unbounded);
  }
}

TEST_CASE("solve_centralized") {
  SUBCASE("interior minimum") {
    const auto inst = quadratic_instance(Eigen::Vector2d(0.0, 0.0), -1.0, 1.0);
    const auto oracle = solve_centralized(inst, 1e-12);
    CHECK(oracle.theta_star.norm() <= 1e-10);
    CHECK(oracle.residual <= 1e-12);
  }
  SUBCASE("active constraint") {
    const auto inst = quadratic_instance(Eigen::VectorXd::Constant(1, 2.0), -1.0, 1.0);
    const auto oracle = solve_centralized(inst, 1e-12);
    CHECK(oracle.theta_star[0] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("reference instance fixed point, cross-checked") {
    const auto [instance, graph] = build_paper_instance();
    const auto oracle = solve_centralized(instance, 1e-10);
    CHECK(oracle.residual <= 1e-10);
    CHECK(instance.omega().contains(oracle.theta_star, 1e-12));

    auto grad_sum = [&](const Eigen::VectorXd& t) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(6);
      for (int i = 0; i < 6; ++i) g += instance.local_grad(i, t);
      return g;
    };

    // fixed point under a different step size
    const Eigen::VectorXd remapped =
        instance.omega().project(oracle.theta_star - 0.01 * grad_sum(oracle.theta_star));
    CHECK((remapped - oracle.theta_star).norm() <= 1e-9);

    // independent multi-start descent lands on the same point
    Rng rng(0x90);
    for (int start = 0; start < 5; ++start) {
      Eigen::VectorXd t = random_box_point(rng, 6);
      for (int it = 0; it < 2000; ++it) {
        t = instance.omega().project(t - 0.5 * grad_sum(t));
      }
      CHECK((t - oracle.theta_star).norm() <= 1e-8);
    }
  }
  SUBCASE("iteration budget enforced") {
    const auto [instance, graph] = build_paper_instance();
    CHECK_THROWS_AS(solve_centralized(instance, 1e-14, 3), NoConvergence);
  }
}

TEST_CASE("global_objective") {
  const auto [instance, graph] = build_paper_instance();
  SUBCASE("log 2 at the origin") {
    CHECK(global_objective(instance, Eigen::VectorXd::Zero(6)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("additivity and optimality") {
    const auto oracle = solve_centralized(instance, 1e-10);
    Rng rng(0xadd);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd theta = random_box_point(rng, 6);
      double per_agent = 0.0;
      for (int i = 0; i < 6; ++i) per_agent += instance.local_value(i, theta);
      CHECK(global_objective(instance, theta) == doctest::Approx(per_agent).epsilon(1e-14));
      CHECK(global_objective(instance, theta) >= oracle.f_star - 1e-10);
    }
  }
}

TEST_CASE("build_paper_instance data") {
  const auto [instance, graph] = build_paper_instance();
  const auto& data = *instance.logistic_data();

  Eigen::VectorXd q1(6);
  q1 << 0.462, 0.798, 0, 0.335, 0.163, 0.102;
  CHECK((data.features[0] - q1).norm() == 0.0);
  CHECK(data.labels == std::vector<int>{1, -1, 1, -1, 1, -1});
  CHECK(data.mu_ridge == 1.0);
  CHECK(validate_doubly_stochastic(graph, 1e-12).pass());

  SUBCASE("mu override and ball option") {
    PaperInstanceOptions options;
    options.mu_ridge = 10.0;
    options.omega_kind = ConstraintSet::Kind::Ball;
    const auto [heavy, g2] = build_paper_instance(options);
    CHECK(heavy.logistic_data()->mu_ridge == 10.0);
    CHECK(heavy.omega().kind() == ConstraintSet::Kind::Ball);
    CHECK(heavy.omega().max_norm() == doctest::Approx(1.0));
  }
}
