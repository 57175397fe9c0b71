#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace declip {

// One undirected communication link with a symmetric mixing weight.
// Agent indices are 1-based, matching the config file convention.
struct Edge {
  int i = 0;
  int j = 0;
  double weight = 0.0;
};

// Doubly stochastic mixing matrix over n agents. `weights()(i, j)` is the
// weight agent i gives to agent j's state. `eta()` is the smallest listed
// link weight and `edge_count_q()` the number of undirected links; together
// they parameterize the consensus contraction bound.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  // Wraps an arbitrary square matrix without checking the mixing invariants;
  // eta and Q are derived from the positive off-diagonal pattern. Use
  // validate_doubly_stochastic to test the invariants.
  static AdjacencyMatrix from_weights(Eigen::MatrixXd weights);

  // Single-agent degenerate graph A = [1]. Mixing is the identity; the
  // contraction bound is undefined for it.
  static AdjacencyMatrix trivial();

  int n() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double eta() const { return eta_; }
  int edge_count_q() const { return edge_count_q_; }

 private:
  AdjacencyMatrix(Eigen::MatrixXd weights, double eta, int edge_count_q)
      : weights_(std::move(weights)), eta_(eta), edge_count_q_(edge_count_q) {}

  friend AdjacencyMatrix build_graph(int n, const std::vector<Edge>& edges);

  Eigen::MatrixXd weights_;
  double eta_ = 0.0;
  int edge_count_q_ = 0;
};

// Builds the mixing matrix from an undirected edge list. Each listed weight
// is applied symmetrically to both directions and the diagonal is completed
// with the row residual, which keeps the matrix doubly stochastic.
//
// Throws DuplicateEdge, NegativeDiagonal or NotConnected; Error on malformed
// entries (index out of range, self-loop, weight outside (0,1)).
AdjacencyMatrix build_graph(int n, const std::vector<Edge>& edges);

// Outcome of the mixing-matrix checks. Failures are carried in the report,
// never thrown.
struct GraphValidationReport {
  double max_row_sum_deviation = 0.0;
  double max_col_sum_deviation = 0.0;
  double min_positive_weight = 0.0;
  double min_entry = 0.0;
  double max_entry = 0.0;
  bool strongly_connected = false;
  double tol = 0.0;

  bool entries_in_range() const { return min_entry >= 0.0 && max_entry <= 1.0; }
  bool pass() const {
    return max_row_sum_deviation <= tol && max_col_sum_deviation <= tol &&
           strongly_connected && entries_in_range();
  }
  std::string summary() const;
};

GraphValidationReport validate_doubly_stochastic(const AdjacencyMatrix& a,
                                                 double tol = 1e-10);

// theta * beta^k bounds max_{i,j} |[A^k]_{ij} - 1/N|.
struct ContractionBound {
  double theta = 1.0;
  double beta = 1.0;

  double at(int k) const;
};

// Evaluates theta = (1 - eta/(4 N^2))^{-2}, beta = (1 - eta/(4 N^2))^{1/Q}.
// Requires n >= 2 and Q >= 1.
ContractionBound consensus_contraction_bound(const AdjacencyMatrix& a);

// max_{i,j} |[A^k]_{ij} - 1/N| computed by repeated multiplication, k >= 1.
double matrix_power_deviation(const AdjacencyMatrix& a, int k);

// One consensus step: v_i = sum_j a_{ij} x_j.
std::vector<Eigen::VectorXd> mix(const AdjacencyMatrix& a,
                                 const std::vector<Eigen::VectorXd>& states);

}  // namespace declip
