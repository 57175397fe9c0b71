#include "declip/noise.hpp"

#include <cmath>

#include "declip/errors.hpp"

namespace declip {

NoiseModel NoiseModel::shifted_pareto(int dim, double gamma, double w_min) {
  if (dim < 1) throw Error("noise dimension must be >= 1");
  if (!(gamma > 1.0)) throw Error("Pareto tail index must exceed 1 (finite mean)");
  if (!(w_min > 0.0)) throw Error("Pareto scale must be positive");
  NoiseModel m;
  m.kind = Kind::ShiftedPareto;
  m.dim = dim;
  m.gamma = gamma;
  m.w_min = w_min;
  return m;
}

NoiseModel NoiseModel::gaussian(int dim, double sigma) {
  if (dim < 1) throw Error("noise dimension must be >= 1");
  if (!(sigma >= 0.0)) throw Error("Gaussian sigma must be nonnegative");
  NoiseModel m;
  m.kind = Kind::Gaussian;
  m.dim = dim;
  m.sigma = sigma;
  return m;
}

NoiseModel NoiseModel::zero(int dim) {
  if (dim < 1) throw Error("noise dimension must be >= 1");
  NoiseModel m;
  m.kind = Kind::Zero;
  m.dim = dim;
  return m;
}

double sample_pareto(Rng& rng, double gamma, double w_min) {
  return w_min * std::pow(rng.uniform01(), -1.0 / gamma);
}

Eigen::VectorXd sample_noise(const NoiseModel& model, Rng& rng) {
  Eigen::VectorXd xi(model.dim);
  switch (model.kind) {
    case NoiseModel::Kind::Zero:
      xi.setZero();
      break;
    case NoiseModel::Kind::Gaussian:
      for (int d = 0; d < model.dim; ++d) xi[d] = rng.normal(model.sigma);
      break;
    case NoiseModel::Kind::ShiftedPareto: {
      const double shift = model.pareto_mean();
      for (int d = 0; d < model.dim; ++d) {
        xi[d] = sample_pareto(rng, model.gamma, model.w_min) - shift;
      }
      break;
    }
  }
  return xi;
}

double estimate_delta_moment(const NoiseModel& model, double delta,
                             std::int64_t n_samples, Rng& rng) {
  if (!(delta > 1.0 && delta <= 2.0)) throw Error("delta must lie in (1,2]");
  if (n_samples < 1) throw Error("need at least one sample");
  if (model.kind == NoiseModel::Kind::ShiftedPareto && delta >= model.gamma) {
    throw MomentDiverges("E||xi||^delta is infinite for delta >= gamma");
  }
  double acc = 0.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    acc += std::pow(sample_noise(model, rng).norm(), delta);
  }
  return acc / static_cast<double>(n_samples);
}

}  // namespace declip
