#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "declip/constraint.hpp"
#include "declip/graph.hpp"

namespace declip {

// Per-agent data of the regularized logistic regression family:
//   f_i(theta) = (1/6) log(1 + exp(-a_i q_i' theta)) + (mu_ridge/12) theta' theta
// with labels a_i in {-1, +1}.
struct LogisticRidgeData {
  std::vector<int> labels;
  std::vector<Eigen::VectorXd> features;
  double mu_ridge = 1.0;

  int n_agents() const { return static_cast<int>(labels.size()); }
  int dim() const { return features.empty() ? 0 : static_cast<int>(features.front().size()); }
};

double logistic_ridge_value(const LogisticRidgeData& data, int agent,
                            const Eigen::VectorXd& theta);

// Gradient of f_i. Evaluated in softplus/sigmoid form, stable for
// |q_i' theta| up to ~700.
Eigen::VectorXd local_gradient(const LogisticRidgeData& data, int agent,
                               const Eigen::VectorXd& theta);

// Constrained sum-of-local-objectives problem. Evaluators are immutable after
// construction and freely shared across concurrent runs.
class ProblemInstance {
 public:
  using Value = std::function<double(const Eigen::VectorXd&)>;
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  ProblemInstance(std::vector<Value> values, std::vector<Gradient> gradients,
                  ConstraintSet omega, int dim, double mu_modulus);

  // Instantiates the logistic-ridge family; certified constants (gradient
  // bound, curvature modulus, Lipschitz constant) come with it.
  static ProblemInstance logistic_ridge(LogisticRidgeData data, ConstraintSet omega);

  int n_agents() const { return static_cast<int>(values_.size()); }
  int dim() const { return dim_; }
  const ConstraintSet& omega() const { return omega_; }

  // Modulus m of the Bregman lower bound
  //   f_i(z2) - f_i(z1) - grad f_i(z1)'(z2 - z1) >= m ||z2 - z1||^2.
  double mu_modulus() const { return mu_modulus_; }

  double local_value(int agent, const Eigen::VectorXd& theta) const;
  Eigen::VectorXd local_grad(int agent, const Eigen::VectorXd& theta) const;

  const std::optional<LogisticRidgeData>& logistic_data() const { return data_; }
  std::optional<double> certified_gradient_bound() const { return certified_c0_; }
  std::optional<double> lipschitz_bound() const { return lipschitz_; }

  ProblemInstance& set_certified_gradient_bound(double c0);
  ProblemInstance& set_lipschitz_bound(double l);

 private:
  std::vector<Value> values_;
  std::vector<Gradient> gradients_;
  ConstraintSet omega_;
  int dim_;
  double mu_modulus_;
  std::optional<LogisticRidgeData> data_;
  std::optional<double> certified_c0_;
  std::optional<double> lipschitz_;
};

// f(theta) = sum_i f_i(theta).
double global_objective(const ProblemInstance& instance, const Eigen::VectorXd& theta);

// Certified C0 with ||grad f_i(theta)|| <= C0 on Omega. For the logistic
// family this is max_i ||q_i||/6 + (mu_ridge/6) * sup_Omega ||theta||.
// Throws Unbounded when no certificate is attached to the instance.
double gradient_bound(const ProblemInstance& instance);

struct OracleResult {
  Eigen::VectorXd theta_star;
  double f_star = 0.0;
  double residual = 0.0;   // || theta - P_Omega[theta - s grad f(theta)] ||
  double step = 0.0;       // s = 1/L
  long iterations = 0;
  double tol = 0.0;
};

// Deterministic projected gradient descent with step 1/L, run to a
// fixed-point residual below tol. Throws NoConvergence past max_iterations.
OracleResult solve_centralized(const ProblemInstance& instance, double tol,
                               long max_iterations = 1'000'000);

struct PaperInstanceOptions {
  double mu_ridge = 1.0;
  ConstraintSet::Kind omega_kind = ConstraintSet::Kind::Box;
};

// The built-in 6-agent logistic-ridge instance together with its 7-link
// communication graph.
std::pair<ProblemInstance, AdjacencyMatrix> build_paper_instance(
    const PaperInstanceOptions& options = {});

}  // namespace declip
