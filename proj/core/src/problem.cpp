#include "declip/problem.hpp"

#include <cmath>
#include <sstream>

#include "declip/errors.hpp"
#include "declip/rng.hpp"

namespace declip {

namespace {

// log(1 + exp(u)) without overflow.
double softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

// 1 / (1 + exp(-u)) without overflow.
double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

void check_agent(int agent, int n) {
  if (agent < 0 || agent >= n) {
    std::ostringstream msg;
    msg << "agent index " << agent << " out of range [0," << n << ")";
    throw Error(msg.str());
  }
}

}  // namespace

double logistic_ridge_value(const LogisticRidgeData& data, int agent,
                            const Eigen::VectorXd& theta) {
  check_agent(agent, data.n_agents());
  const auto& q = data.features[static_cast<std::size_t>(agent)];
  if (q.size() != theta.size()) throw DimensionMismatch("theta/feature dimension mismatch");
  const double margin = data.labels[static_cast<std::size_t>(agent)] * q.dot(theta);
  return softplus(-margin) / 6.0 + data.mu_ridge / 12.0 * theta.squaredNorm();
}

Eigen::VectorXd local_gradient(const LogisticRidgeData& data, int agent,
                               const Eigen::VectorXd& theta) {
  check_agent(agent, data.n_agents());
  const auto& q = data.features[static_cast<std::size_t>(agent)];
  if (q.size() != theta.size()) throw DimensionMismatch("theta/feature dimension mismatch");
  const double a = data.labels[static_cast<std::size_t>(agent)];
  const double margin = a * q.dot(theta);
  return (-a * sigmoid(-margin) / 6.0) * q + (data.mu_ridge / 6.0) * theta;
}

ProblemInstance::ProblemInstance(std::vector<Value> values,
                                 std::vector<Gradient> gradients,
                                 ConstraintSet omega, int dim, double mu_modulus)
    : values_(std::move(values)),
      gradients_(std::move(gradients)),
      omega_(std::move(omega)),
      dim_(dim),
      mu_modulus_(mu_modulus) {
  if (values_.empty() || values_.size() != gradients_.size()) {
    throw Error("instance needs matching, non-empty value/gradient lists");
  }
  if (omega_.dim() != dim_) throw DimensionMismatch("constraint set dimension mismatch");
}

ProblemInstance ProblemInstance::logistic_ridge(LogisticRidgeData data,
                                                ConstraintSet omega) {
  const int n = data.n_agents();
  if (n == 0 || static_cast<int>(data.features.size()) != n) {
    throw Error("logistic data needs one feature vector per label");
  }
  for (int label : data.labels) {
    if (label != 1 && label != -1) throw Error("labels must be +1 or -1");
  }
  const int dim = data.dim();
  for (const auto& q : data.features) {
    if (q.size() != dim || !q.allFinite()) throw Error("feature vectors must be finite, equal-dimension");
  }
  if (!(data.mu_ridge >= 0.0)) throw Error("mu_ridge must be nonnegative");

  std::vector<Value> values;
  std::vector<Gradient> grads;
  values.reserve(static_cast<std::size_t>(n));
  grads.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    values.emplace_back([data, i](const Eigen::VectorXd& theta) {
      return logistic_ridge_value(data, i, theta);
    });
    grads.emplace_back([data, i](const Eigen::VectorXd& theta) {
      return local_gradient(data, i, theta);
    });
  }

  // The ridge term alone certifies the Bregman gap f_i(z2) - f_i(z1)
  // - grad'(z2-z1) >= (mu_ridge/12) ||z2-z1||^2; the logistic part is convex.
  ProblemInstance instance(std::move(values), std::move(grads), std::move(omega),
                           dim, data.mu_ridge / 12.0);

  double max_feature_norm = 0.0;
  double sum_sq = 0.0;
  for (const auto& q : data.features) {
    max_feature_norm = std::max(max_feature_norm, q.norm());
    sum_sq += q.squaredNorm();
  }
  const double radius = instance.omega().max_norm();
  instance.set_certified_gradient_bound(max_feature_norm / 6.0 +
                                        data.mu_ridge / 6.0 * radius);
  // Hessian of sum f_i: sum_i sigma'(.) q_i q_i'/6 + N mu/6 I, sigma' <= 1/4.
  instance.set_lipschitz_bound(sum_sq / 24.0 + n * data.mu_ridge / 6.0);
  instance.data_ = std::move(data);
  return instance;
}

double ProblemInstance::local_value(int agent, const Eigen::VectorXd& theta) const {
  check_agent(agent, n_agents());
  return values_[static_cast<std::size_t>(agent)](theta);
}

Eigen::VectorXd ProblemInstance::local_grad(int agent,
                                            const Eigen::VectorXd& theta) const {
  check_agent(agent, n_agents());
  return gradients_[static_cast<std::size_t>(agent)](theta);
}

ProblemInstance& ProblemInstance::set_certified_gradient_bound(double c0) {
  certified_c0_ = c0;
  return *this;
}

ProblemInstance& ProblemInstance::set_lipschitz_bound(double l) {
  lipschitz_ = l;
  return *this;
}

double global_objective(const ProblemInstance& instance, const Eigen::VectorXd& theta) {
  if (!theta.allFinite()) throw Error("objective requires a finite point");
  double total = 0.0;
  for (int i = 0; i < instance.n_agents(); ++i) total += instance.local_value(i, theta);
  return total;
}

double gradient_bound(const ProblemInstance& instance) {
  if (instance.certified_gradient_bound()) return *instance.certified_gradient_bound();
  throw Unbounded("no certified gradient bound attached to this instance");
}

namespace {

// Fallback Lipschitz estimate from sampled gradient differences; factor-2
// safety margin, fixed internal seed so the oracle stays deterministic.
double estimate_lipschitz(const ProblemInstance& instance) {
  Rng rng(0x11b5);
  const auto& omega = instance.omega();
  const int dim = instance.dim();
  auto sample_point = [&]() {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x[d] = 2.0 * rng.uniform01() - 1.0;
    return omega.project(omega.max_norm() * x);
  };
  auto grad_sum = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < instance.n_agents(); ++i) g += instance.local_grad(i, x);
    return g;
  };
  double ratio = 0.0;
  for (int trial = 0; trial < 256; ++trial) {
    const Eigen::VectorXd x = sample_point();
    const Eigen::VectorXd y = sample_point();
    const double gap = (x - y).norm();
    if (gap < 1e-12) continue;
    ratio = std::max(ratio, (grad_sum(x) - grad_sum(y)).norm() / gap);
  }
  return std::max(2.0 * ratio, 1e-8);
}

}  // namespace

OracleResult solve_centralized(const ProblemInstance& instance, double tol,
                               long max_iterations) {
  if (!(tol > 0.0)) throw Error("oracle tolerance must be positive");
  const double lipschitz = instance.lipschitz_bound()
                               ? *instance.lipschitz_bound()
                               : estimate_lipschitz(instance);
  const double step = 1.0 / lipschitz;
  const auto& omega = instance.omega();

  Eigen::VectorXd theta = omega.project(Eigen::VectorXd::Zero(instance.dim()));
  OracleResult result;
  result.step = step;
  result.tol = tol;

  for (long k = 0; k < max_iterations; ++k) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(instance.dim());
    for (int i = 0; i < instance.n_agents(); ++i) grad += instance.local_grad(i, theta);
    const Eigen::VectorXd next = omega.project(theta - step * grad);
    const double residual = (theta - next).norm();
    theta = next;
    if (residual <= tol) {
      result.theta_star = std::move(theta);
      result.residual = residual;
      result.iterations = k + 1;
      result.f_star = global_objective(instance, result.theta_star);
      return result;
    }
  }
  throw NoConvergence("projected gradient oracle did not reach tolerance");
}

std::pair<ProblemInstance, AdjacencyMatrix> build_paper_instance(
    const PaperInstanceOptions& options) {
  LogisticRidgeData data;
  data.labels = {1, -1, 1, -1, 1, -1};
  data.mu_ridge = options.mu_ridge;
  auto vec = [](std::initializer_list<double> v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.begin(),
                                                             static_cast<Eigen::Index>(v.size())));
  };
  data.features = {
      vec({0.462, 0.798, 0.0, 0.335, 0.163, 0.102}),
      vec({0.167, 0.309, 0.355, 0.482, 0.375, 0.614}),
      vec({0.155, 0.664, 0.021, 0.507, 0.316, 0.422}),
      vec({0.094, 0.133, 0.538, 0.651, 0.211, 0.465}),
      vec({0.568, 0.580, 0.055, 0.025, 0.110, 0.570}),
      vec({0.070, 0.300, 0.683, 0.380, 0.493, 0.225}),
  };

  ConstraintSet omega = options.omega_kind == ConstraintSet::Kind::Box
                            ? ConstraintSet::box(6, -1.0, 1.0)
                            : ConstraintSet::ball(Eigen::VectorXd::Zero(6), 1.0);

  const double third = 1.0 / 3.0;
  const double two_thirds = 2.0 / 3.0;
  AdjacencyMatrix graph = build_graph(6, {{1, 2, third},
                                          {2, 3, third},
                                          {2, 5, third},
                                          {5, 6, third},
                                          {5, 4, third},
                                          {1, 6, two_thirds},
                                          {3, 4, two_thirds}});

  return {ProblemInstance::logistic_ridge(std::move(data), std::move(omega)),
          std::move(graph)};
}

}  // namespace declip
