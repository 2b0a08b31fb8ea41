#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "stackbandit/geometry.hpp"
#include "stackbandit/random.hpp"

namespace stackbandit {

/// Euclidean ball {th : |th - center| <= radius}. radius may be +infinity.
struct BallConfidence {
  RealVector center;
  double radius = std::numeric_limits<double>::infinity();

  bool contains(const RealVector& theta, double tol = 1e-12) const;
  /// sup over the ball of th . x
  double optimistic_value(const RealVector& x) const;
};

/// Parameter ellipsoid {th : (th - center)' V (th - center) <= radius^2} with
/// V symmetric positive definite.
class EllipsoidConfidence {
 public:
  EllipsoidConfidence(RealVector center, RealMatrix shape, double radius);

  const RealVector& center() const { return center_; }
  const RealMatrix& shape() const { return shape_; }
  double radius() const { return radius_; }
  Eigen::Index dim() const { return center_.size(); }
  double min_eigenvalue() const { return eigenvalues_.minCoeff(); }
  double max_eigenvalue() const { return eigenvalues_.maxCoeff(); }

  bool contains(const RealVector& theta, double tol = 1e-9) const;
  /// |x|_{V^{-1}}
  double width(const RealVector& x) const;
  /// sup over the ellipsoid of th . x = center . x + radius |x|_{V^{-1}}
  double optimistic_value(const RealVector& x) const;
  /// Maximizer of th . x over the ellipsoid.
  RealVector maximizer(const RealVector& x) const;
  /// Euclidean projection onto the ellipsoid.
  RealVector project(const RealVector& z) const;
  /// Point of the ellipsoid with the largest Euclidean norm.
  ///
  /// Solves the trust-region problem max |c + M u|^2 over |u| <= 1 with
  /// M = radius V^{-1/2} through its secular equation, handling the hard case.
  /// Normalizing the result gives the unit vector maximizing the optimistic
  /// value over the whole sphere.
  RealVector max_norm_point() const;

 private:
  RealVector center_;
  RealMatrix shape_;
  double radius_;
  RealMatrix eigenvectors_;
  RealVector eigenvalues_;
};

/// Regularized least squares th = (lambda I + sum x x')^{-1} sum y x with the
/// inverse Gram matrix maintained by Sherman-Morrison updates.
class RidgeRegression {
 public:
  RidgeRegression(Eigen::Index dim, double lambda);

  void add(const RealVector& x, double y);

  Eigen::Index dim() const { return xty_.size(); }
  double lambda() const { return lambda_; }
  std::size_t count() const { return count_; }
  const RealMatrix& gram() const { return gram_; }
  const RealMatrix& gram_inverse() const { return gram_inv_; }
  RealVector estimate() const { return gram_inv_ * xty_; }

  EllipsoidConfidence confidence(double radius) const;

 private:
  double lambda_;
  std::size_t count_ = 0;
  RealMatrix gram_;
  RealMatrix gram_inv_;
  RealVector xty_;
};

/// Ellipsoid radius after n observations:
/// sigma_r sqrt(dim log((1 + n / lambda) / delta)) + sqrt(lambda).
double linear_confidence_radius(double sigma_r, Eigen::Index dim, std::size_t n, double lambda, double delta);

struct IntersectionOptions {
  int iterations = 50;
  int restarts = 8;
  /// Use closed forms when one set provably contains the other.
  bool allow_shortcuts = true;
};

struct IntersectionResult {
  /// Per-candidate sup over the intersection of th . x (or over the
  /// ellipsoid alone when the intersection is empty).
  std::vector<double> values;
  bool empty = false;
};

/// Optimistic values over the intersection of a response ball and a reward
/// ellipsoid. General position is handled by projected ascent: a gradient
/// step along x followed by Dykstra projection onto the intersection, from
/// several starting points.
IntersectionResult confidence_intersection(const BallConfidence& ball, const EllipsoidConfidence& ellipsoid,
                                           const std::vector<RealVector>& candidates, RandomSource& rng,
                                           const IntersectionOptions& options = {});

/// Euclidean projection onto ball ∩ ellipsoid by Dykstra's alternating
/// projections. The intersection must be nonempty.
RealVector project_to_intersection(const BallConfidence& ball, const EllipsoidConfidence& ellipsoid,
                                   const RealVector& z, int max_iterations = 500);

}  // namespace stackbandit
