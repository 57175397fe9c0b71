#pragma once

#include <Eigen/Core>

namespace declip {

// Nonempty convex compact constraint set with a closed-form Euclidean
// projection: either a coordinate box or a Euclidean ball.
class ConstraintSet {
 public:
  enum class Kind { Box, Ball };

  static ConstraintSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static ConstraintSet box(int dim, double lower, double upper);
  static ConstraintSet ball(Eigen::VectorXd center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lower_or_center_.size()); }

  const Eigen::VectorXd& lower() const { return lower_or_center_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Eigen::VectorXd& center() const { return lower_or_center_; }
  double radius() const { return radius_; }

  // Nearest point of the set; clamp for boxes, radial rescale for balls.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

  // sup over the set of the Euclidean norm; used for certified gradient bounds.
  double max_norm() const;

 private:
  ConstraintSet(Kind kind, Eigen::VectorXd a, Eigen::VectorXd b, double radius)
      : kind_(kind),
        lower_or_center_(std::move(a)),
        upper_(std::move(b)),
        radius_(radius) {}

  Kind kind_;
  Eigen::VectorXd lower_or_center_;
  Eigen::VectorXd upper_;  // empty for balls
  double radius_ = 0.0;
};

// Free-function form of the projection operator.
Eigen::VectorXd project(const ConstraintSet& omega, const Eigen::VectorXd& x);

}  // namespace declip
