#include "declip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "declip/errors.hpp"

namespace declip {

namespace {

// Reachability from node 0 over positive off-diagonal entries. With symmetric
// weights directed and undirected connectivity coincide; for asymmetric
// matrices (from_weights) check both directions.
bool strongly_connected(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  if (n <= 1) return true;

  auto reachable_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const double entry = transpose ? w(v, u) : w(u, v);
        if (u != v && entry > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };

  return reachable_all(false) && reachable_all(true);
}

}  // namespace

AdjacencyMatrix AdjacencyMatrix::from_weights(Eigen::MatrixXd weights) {
  if (weights.rows() != weights.cols() || weights.rows() < 1) {
    throw DimensionMismatch("adjacency matrix must be square and non-empty");
  }
  const int n = static_cast<int>(weights.rows());
  double eta = std::numeric_limits<double>::infinity();
  int q = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || weights(i, j) <= 0.0) continue;
      eta = std::min(eta, weights(i, j));
      if (j > i || weights(j, i) <= 0.0) ++q;  // count undirected links once
    }
  }
  if (!std::isfinite(eta)) eta = 0.0;
  return AdjacencyMatrix(std::move(weights), eta, q);
}

AdjacencyMatrix AdjacencyMatrix::trivial() {
  return AdjacencyMatrix(Eigen::MatrixXd::Ones(1, 1), 0.0, 0);
}

AdjacencyMatrix build_graph(int n, const std::vector<Edge>& edges) {
  if (n == 1 && edges.empty()) return AdjacencyMatrix::trivial();
  if (n < 2) throw Error("graph needs at least 2 agents (or 1 with no edges)");

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::set<std::pair<int, int>> seen;
  double eta = std::numeric_limits<double>::infinity();

  for (const Edge& e : edges) {
    if (e.i < 1 || e.i > n || e.j < 1 || e.j > n) {
      std::ostringstream msg;
      msg << "edge (" << e.i << "," << e.j << ") out of range for n=" << n;
      throw Error(msg.str());
    }
    if (e.i == e.j) {
      throw Error("self-loops are not allowed; diagonals are computed as row residuals");
    }
    if (!(e.weight > 0.0 && e.weight < 1.0)) {
      std::ostringstream msg;
      msg << "edge (" << e.i << "," << e.j << ") weight " << e.weight
          << " outside (0,1)";
      throw Error(msg.str());
    }
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      std::ostringstream msg;
      msg << "edge (" << key.first << "," << key.second << ") listed twice";
      throw DuplicateEdge(msg.str());
    }
    w(e.i - 1, e.j - 1) = e.weight;
    w(e.j - 1, e.i - 1) = e.weight;
    eta = std::min(eta, e.weight);
  }

  for (int i = 0; i < n; ++i) {
    const double off = w.row(i).sum();
    if (off > 1.0 + 1e-15) {
      std::ostringstream msg;
      msg << "row " << i + 1 << " off-diagonal sum " << off
          << " exceeds 1; no nonnegative diagonal exists";
      throw NegativeDiagonal(msg.str());
    }
    w(i, i) = std::max(0.0, 1.0 - off);
  }

  if (!strongly_connected(w)) {
    throw NotConnected("positive-weight graph is not strongly connected");
  }

  AdjacencyMatrix a(std::move(w), eta, static_cast<int>(edges.size()));
  return a;
}

std::string GraphValidationReport::summary() const {
  std::ostringstream out;
  out << (pass() ? "PASS" : "FAIL")
      << " row_dev=" << max_row_sum_deviation
      << " col_dev=" << max_col_sum_deviation
      << " min_pos_weight=" << min_positive_weight
      << " connected=" << (strongly_connected ? "yes" : "no")
      << " entries_in_[0,1]=" << (entries_in_range() ? "yes" : "no")
      << " tol=" << tol;
  return out.str();
}

GraphValidationReport validate_doubly_stochastic(const AdjacencyMatrix& a,
                                                 double tol) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  const Eigen::MatrixXd& w = a.weights();
  const int n = a.n();

  GraphValidationReport report;
  report.tol = tol;
  report.max_row_sum_deviation =
      (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
  report.max_col_sum_deviation =
      (w.colwise().sum().array() - 1.0).abs().maxCoeff();
  report.min_entry = w.minCoeff();
  report.max_entry = w.maxCoeff();

  double min_pos = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && w(i, j) > 0.0) min_pos = std::min(min_pos, w(i, j));
  report.min_positive_weight = std::isfinite(min_pos) ? min_pos : 0.0;

  report.strongly_connected = strongly_connected(w);
  return report;
}

double ContractionBound::at(int k) const { return theta * std::pow(beta, k); }

ContractionBound consensus_contraction_bound(const AdjacencyMatrix& a) {
  if (a.n() < 2) throw Error("contraction bound needs at least 2 agents");
  if (a.edge_count_q() < 1) throw Error("contraction bound needs at least one edge");
  const double n = static_cast<double>(a.n());
  const double base = 1.0 - a.eta() / (4.0 * n * n);
  ContractionBound bound;
  bound.theta = std::pow(base, -2.0);
  bound.beta = std::pow(base, 1.0 / static_cast<double>(a.edge_count_q()));
  return bound;
}

double matrix_power_deviation(const AdjacencyMatrix& a, int k) {
  if (k < 1) throw Error("matrix power requires k >= 1");
  const int n = a.n();
  Eigen::MatrixXd p = a.weights();
  for (int step = 1; step < k; ++step) p = p * a.weights();
  return (p.array() - 1.0 / static_cast<double>(n)).abs().maxCoeff();
}

std::vector<Eigen::VectorXd> mix(const AdjacencyMatrix& a,
                                 const std::vector<Eigen::VectorXd>& states) {
  const int n = a.n();
  if (static_cast<int>(states.size()) != n) {
    throw DimensionMismatch("mix: state count does not match agent count");
  }
  const Eigen::Index dim = states.empty() ? 0 : states.front().size();
  for (const auto& x : states) {
    if (x.size() != dim) throw DimensionMismatch("mix: state dimensions differ");
  }

  std::vector<Eigen::VectorXd> mixed(static_cast<std::size_t>(n));
  const Eigen::MatrixXd& w = a.weights();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < n; ++j) {
      if (w(i, j) != 0.0) v += w(i, j) * states[static_cast<std::size_t>(j)];
    }
    mixed[static_cast<std::size_t>(i)] = std::move(v);
  }
  return mixed;
}

}  // namespace declip
