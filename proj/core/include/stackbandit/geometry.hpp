#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "stackbandit/random.hpp"

namespace stackbandit {

/// Dense real vector for actions, responses and parameters.
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Thrown when a net would exceed its configured size cap.
class NetSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const RealVector& v, std::string_view what);

RealVector unit_vector(Eigen::Index d, Eigen::Index axis);

/// Euclidean projection onto the centered ball of the given radius.
RealVector project_to_ball(const RealVector& v, double radius);

/// Radial projection onto the unit sphere. Vectors with norm <= 1e-12 map to
/// the first standard basis vector.
RealVector project_to_sphere(const RealVector& v);

RealVector sample_uniform_sphere(RandomSource& rng, Eigen::Index d);
RealVector sample_uniform_ball(RandomSource& rng, Eigen::Index d);

/// Surface fraction of S^{d-1} occupied by the cap {u : u . c >= zeta}.
double cap_probability(Eigen::Index d, double zeta);

/// Uniform sample from the cap {u in S^{d-1} : u . center >= zeta}.
///
/// Uses rejection from the sphere when the cap holds more than a quarter of the
/// surface, otherwise draws the polar angle with density proportional to
/// sin^{d-2} and a uniform tangent direction.
RealVector sample_uniform_cap(RandomSource& rng, const RealVector& center, double zeta);

struct SphereDomain {};

struct CapDomain {
  RealVector center;
  double zeta = 0.0;
};

using NetDomain = std::variant<SphereDomain, CapDomain>;

struct NetOptions {
  /// Stop after failure_factor * size consecutive rejected candidates.
  double failure_factor = 20.0;
  std::size_t max_points = std::size_t{1} << 20;
};

/// Finite point set on a sphere or spherical cap built by greedy packing.
///
/// Distinct points are more than `separation()` apart; `radius()` is the
/// declared covering radius, twice the separation.
class Net {
 public:
  Net(std::vector<RealVector> points, double separation, NetDomain domain);

  const std::vector<RealVector>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return points_.front().size(); }
  double separation() const { return separation_; }
  double radius() const { return 2.0 * separation_; }
  const NetDomain& domain() const { return domain_; }

  /// True when v lies in the declared domain to within tol.
  bool in_domain(const RealVector& v, double tol = 1e-9) const;

  /// Index of and distance to the nearest net point (linear scan).
  std::pair<std::size_t, double> nearest(const RealVector& v) const;

 private:
  std::vector<RealVector> points_;
  double separation_;
  NetDomain domain_;
};

Net build_net_sphere(Eigen::Index d, double eps, RandomSource& rng, const NetOptions& options = {});

Net build_net_cap(const RealVector& center, double zeta, double eps, RandomSource& rng,
                  const NetOptions& options = {});

/// Image of a cap net under the Householder reflection taking its center to
/// `center`. Reflections are isometries, so separation and covering radius
/// carry over.
Net reflect_cap_net(const Net& net, const RealVector& center);

}  // namespace stackbandit
