#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "declip/rng.hpp"

namespace declip {

// Zero-mean gradient noise generator. The shifted-Pareto kind has infinite
// variance for tail index gamma in (1,2] while keeping finite moments of
// every order delta < gamma.
struct NoiseModel {
  enum class Kind { ShiftedPareto, Gaussian, Zero };

  Kind kind = Kind::Zero;
  int dim = 1;
  double gamma = 2.0;  // Pareto tail index, > 1
  double w_min = 1.0;  // Pareto scale, > 0
  double sigma = 1.0;  // Gaussian std

  static NoiseModel shifted_pareto(int dim, double gamma, double w_min = 1.0);
  static NoiseModel gaussian(int dim, double sigma);
  static NoiseModel zero(int dim);

  // Mean of the raw Pareto variate, gamma w_min / (gamma - 1); subtracting it
  // centers every tail index, not just gamma = 2.
  double pareto_mean() const { return gamma * w_min / (gamma - 1.0); }
};

// One Pareto variate by inverse CDF: w = w_min * U^{-1/gamma}, U in (0,1).
double sample_pareto(Rng& rng, double gamma, double w_min);

// One noise vector with independent coordinates.
Eigen::VectorXd sample_noise(const NoiseModel& model, Rng& rng);

// Monte-Carlo estimate of E ||xi||^delta over n_samples draws.
// Throws MomentDiverges when delta >= gamma for the Pareto kind.
double estimate_delta_moment(const NoiseModel& model, double delta,
                             std::int64_t n_samples, Rng& rng);

}  // namespace declip
