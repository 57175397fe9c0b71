#include "declip/constraint.hpp"

#include <cmath>
#include <utility>

#include "declip/errors.hpp"

namespace declip {

ConstraintSet ConstraintSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw DimensionMismatch("box bounds must have equal, positive dimension");
  }
  if ((lower.array() > upper.array()).any()) {
    throw Error("box has an empty coordinate interval");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    throw Error("box bounds must be finite (compactness)");
  }
  return ConstraintSet(Kind::Box, std::move(lower), std::move(upper), 0.0);
}

ConstraintSet ConstraintSet::box(int dim, double lower, double upper) {
  return box(Eigen::VectorXd::Constant(dim, lower),
             Eigen::VectorXd::Constant(dim, upper));
}

ConstraintSet ConstraintSet::ball(Eigen::VectorXd center, double radius) {
  if (center.size() == 0) throw DimensionMismatch("ball center must be non-empty");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error("ball radius must be positive and finite");
  }
  if (!center.allFinite()) throw Error("ball center must be finite");
  return ConstraintSet(Kind::Ball, std::move(center), Eigen::VectorXd(), radius);
}

Eigen::VectorXd ConstraintSet::project(const Eigen::VectorXd& x) const {
  if (x.size() != lower_or_center_.size()) {
    throw DimensionMismatch("projection input dimension does not match the set");
  }
  if (kind_ == Kind::Box) {
    return x.cwiseMax(lower_or_center_).cwiseMin(upper_);
  }
  const Eigen::VectorXd offset = x - lower_or_center_;
  const double norm = offset.norm();
  if (norm <= radius_) return x;
  return lower_or_center_ + (radius_ / norm) * offset;
}

bool ConstraintSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower_or_center_.size()) return false;
  if (kind_ == Kind::Box) {
    return (x.array() >= lower_or_center_.array() - tol).all() &&
           (x.array() <= upper_.array() + tol).all();
  }
  return (x - lower_or_center_).norm() <= radius_ + tol;
}

double ConstraintSet::max_norm() const {
  if (kind_ == Kind::Box) {
    return lower_or_center_.cwiseAbs().cwiseMax(upper_.cwiseAbs()).norm();
  }
  return lower_or_center_.norm() + radius_;
}

Eigen::VectorXd project(const ConstraintSet& omega, const Eigen::VectorXd& x) {
  return omega.project(x);
}

}  // namespace declip
