// Test-side reference computations, independent of the library code paths
// they check: finite differences, adaptive quadrature, empirical CDF
// distance, and a random-graph generator for property tests.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "declip/graph.hpp"
#include "declip/rng.hpp"

namespace testsupport {

// Central finite-difference gradient.
inline Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h = 1e-6) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    probe[d] = x[d] + h;
    const double up = f(probe);
    probe[d] = x[d] - h;
    const double down = f(probe);
    probe[d] = x[d];
    grad[d] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb, double whole,
                               double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  return detail::adaptive_simpson(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb),
                                  tol, 60);
}

// E |xi|^delta for the shifted Pareto noise: density
// gamma w_min^gamma / (xi + shift)^(gamma+1) on (w_min - shift, inf) with
// shift = gamma w_min / (gamma - 1). Integrates the bulk directly and bounds
// the tail analytically.
inline double pareto_abs_moment(double gamma, double w_min, double delta,
                                double tol = 1e-10) {
  const double shift = gamma * w_min / (gamma - 1.0);
  auto density = [=](double xi) {
    return gamma * std::pow(w_min, gamma) / std::pow(xi + shift, gamma + 1.0);
  };
  auto integrand = [=](double xi) { return std::pow(std::abs(xi), delta) * density(xi); };
  const double lower = w_min - shift;
  const double cut = 1e9;
  const double bulk = integrate(integrand, lower, cut, tol);
  // For xi >> shift: |xi|^delta p(xi) <= gamma w_min^gamma xi^{delta-gamma-1}.
  const double tail = gamma * std::pow(w_min, gamma) / (gamma - delta) *
                      std::pow(cut, delta - gamma);
  return bulk + tail;
}

// Kolmogorov-Smirnov distance between a sample and an analytic CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double c = cdf(sample[i]);
    d = std::max(d, std::abs(c - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
  }
  return d;
}

// Random connected graph with Metropolis-style weights
// w_ij = c_e / (max(deg_i, deg_j) + 1), c_e in [0.4, 0.95]: always row-sum
// feasible, strictly positive diagonals, strongly connected by construction.
inline declip::AdjacencyMatrix random_metropolis_graph(declip::Rng& rng, int max_n = 12) {
  const int n = 2 + static_cast<int>(rng.uniform01() * (max_n - 1));
  std::vector<std::pair<int, int>> links;
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(rng.uniform01() * v);
    links.emplace_back(u, v);
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const bool in_tree =
          std::find(links.begin(), links.end(), std::make_pair(u, v)) != links.end();
      if (!in_tree && rng.uniform01() < 0.25) links.emplace_back(u, v);
    }
  }
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : links) {
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
  }
  std::vector<declip::Edge> edges;
  edges.reserve(links.size());
  for (const auto& [u, v] : links) {
    const double c = 0.4 + 0.55 * rng.uniform01();
    const int deg = std::max(degree[static_cast<std::size_t>(u)],
                             degree[static_cast<std::size_t>(v)]);
    edges.push_back({u + 1, v + 1, c / static_cast<double>(deg + 1)});
  }
  return declip::build_graph(n, edges);
}

}  // namespace testsupport
