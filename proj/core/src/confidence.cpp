#include "stackbandit/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stackbandit {

bool BallConfidence::contains(const RealVector& theta, double tol) const {
  if (std::isinf(radius)) return true;
  return (theta - center).norm() <= radius + tol;
}

double BallConfidence::optimistic_value(const RealVector& x) const {
  if (std::isinf(radius)) return std::numeric_limits<double>::infinity();
  return center.dot(x) + radius * x.norm();
}

EllipsoidConfidence::EllipsoidConfidence(RealVector center, RealMatrix shape, double radius)
    : center_(std::move(center)), shape_(std::move(shape)), radius_(radius) {
  require_finite(center_, "EllipsoidConfidence");
  if (shape_.rows() != center_.size() || shape_.cols() != center_.size()) {
    throw std::invalid_argument("EllipsoidConfidence: shape dimension mismatch");
  }
  if (!(radius_ >= 0.0) || !std::isfinite(radius_)) {
    throw std::invalid_argument("EllipsoidConfidence: radius must be finite and nonnegative");
  }
  if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + shape_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("EllipsoidConfidence: shape must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(shape_);
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  if (!(eigenvalues_.minCoeff() > 0.0)) {
    throw std::invalid_argument("EllipsoidConfidence: shape must be positive definite");
  }
}

bool EllipsoidConfidence::contains(const RealVector& theta, double tol) const {
  const RealVector e = theta - center_;
  return e.dot(shape_ * e) <= radius_ * radius_ * (1.0 + tol) + tol;
}

double EllipsoidConfidence::width(const RealVector& x) const {
  const RealVector w = eigenvectors_.transpose() * x;
  return std::sqrt((w.array().square() / eigenvalues_.array()).sum());
}

double EllipsoidConfidence::optimistic_value(const RealVector& x) const {
  return center_.dot(x) + radius_ * width(x);
}

RealVector EllipsoidConfidence::maximizer(const RealVector& x) const {
  const double w = width(x);
  if (w == 0.0) return center_;
  const RealVector vinv_x = eigenvectors_ * ((eigenvectors_.transpose() * x).array() / eigenvalues_.array()).matrix();
  return center_ + (radius_ / w) * vinv_x;
}

RealVector EllipsoidConfidence::project(const RealVector& z) const {
  if (contains(z, 0.0)) return z;
  const RealVector w = eigenvectors_.transpose() * (z - center_);
  const double r2 = radius_ * radius_;
  auto constraint = [&](double mu) {
    return (eigenvalues_.array() * w.array().square() / (1.0 + mu * eigenvalues_.array()).square()).sum();
  };
  double lo = 0.0;
  double hi = 1.0 / eigenvalues_.maxCoeff();
  while (constraint(hi) > r2) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (constraint(mid) > r2 ? lo : hi) = mid;
  }
  const RealVector y = (w.array() / (1.0 + hi * eigenvalues_.array())).matrix();
  return center_ + eigenvectors_ * y;
}

RealVector EllipsoidConfidence::max_norm_point() const {
  // In the eigenbasis of V: a_i = r^2 / lambda_i are the eigenvalues of M^2,
  // g_i = r lambda_i^{-1/2} c_i are the coordinates of M c.
  const Eigen::Index n = dim();
  const RealVector c = eigenvectors_.transpose() * center_;
  const RealVector scale = radius_ * eigenvalues_.array().rsqrt();
  const RealVector a = scale.array().square();
  const RealVector g = scale.array() * c.array();
  const double a_max = a.maxCoeff();
  const double tie_tol = 1e-12 * std::max(1.0, a_max);
  const double g_norm = g.norm();

  auto norm_u2 = [&](double s) { return (g.array().square() / (s - a.array()).square()).sum(); };

  RealVector u(n);
  bool top_degenerate = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a_max - a(i) <= tie_tol && std::abs(g(i)) > 1e-14 * std::max(1.0, g_norm)) top_degenerate = false;
  }
  double rest = 0.0;
  if (top_degenerate) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a_max - a(i) > tie_tol) rest += g(i) * g(i) / ((a_max - a(i)) * (a_max - a(i)));
    }
  }
  if (top_degenerate && rest <= 1.0) {
    // Hard case: the multiplier sits at a_max and the slack goes along the top
    // eigenvector.
    Eigen::Index top = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a_max - a(i) > tie_tol) {
        u(i) = g(i) / (a_max - a(i));
      } else {
        u(i) = 0.0;
        top = i;
      }
    }
    u(top) = std::sqrt(std::max(0.0, 1.0 - rest));
  } else {
    double lo = a_max;
    double hi = a_max + std::max(g_norm, 1e-300);
    for (int it = 0; it < 300 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (norm_u2(mid) > 1.0 ? lo : hi) = mid;
    }
    u = (g.array() / (hi - a.array())).matrix();
  }
  const RealVector theta_eig = c + (scale.array() * u.array()).matrix();
  return eigenvectors_ * theta_eig;
}

RidgeRegression::RidgeRegression(Eigen::Index dim, double lambda)
    : lambda_(lambda),
      gram_(RealMatrix::Identity(dim, dim) * lambda),
      gram_inv_(RealMatrix::Identity(dim, dim) / lambda),
      xty_(RealVector::Zero(dim)) {
  if (!(lambda > 0.0)) throw std::invalid_argument("RidgeRegression: lambda must be positive");
  if (dim < 1) throw std::invalid_argument("RidgeRegression: dim must be >= 1");
}

void RidgeRegression::add(const RealVector& x, double y) {
  if (x.size() != dim()) throw std::invalid_argument("RidgeRegression: feature dimension mismatch");
  gram_.noalias() += x * x.transpose();
  const RealVector vx = gram_inv_ * x;
  gram_inv_.noalias() -= (vx * vx.transpose()) / (1.0 + x.dot(vx));
  xty_ += y * x;
  ++count_;
  // Periodic refactorization keeps the rank-one updates from drifting.
  if (count_ % 4096 == 0) gram_inv_ = gram_.inverse();
}

EllipsoidConfidence RidgeRegression::confidence(double radius) const {
  RealMatrix sym = 0.5 * (gram_ + gram_.transpose());
  return EllipsoidConfidence(estimate(), std::move(sym), radius);
}

double linear_confidence_radius(double sigma_r, Eigen::Index dim, std::size_t n, double lambda, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence radius: delta must lie in (0, 1)");
  const double log_term = std::log((1.0 + static_cast<double>(n) / lambda) / delta);
  return sigma_r * std::sqrt(static_cast<double>(dim) * log_term) + std::sqrt(lambda);
}

RealVector project_to_intersection(const BallConfidence& ball, const EllipsoidConfidence& ellipsoid,
                                   const RealVector& z, int max_iterations) {
  auto project_ball = [&](const RealVector& v) -> RealVector {
    if (std::isinf(ball.radius)) return v;
    const RealVector d = v - ball.center;
    const double n = d.norm();
    if (n <= ball.radius) return v;
    return ball.center + d * (ball.radius / n);
  };
  RealVector x = z;
  RealVector p = RealVector::Zero(z.size());
  RealVector q = RealVector::Zero(z.size());
  for (int it = 0; it < max_iterations; ++it) {
    const RealVector y = ellipsoid.project(x + p);
    p = x + p - y;
    const RealVector x_next = project_ball(y + q);
    q = y + q - x_next;
    const double change = (x_next - x).norm();
    x = x_next;
    if (change <= 1e-13 * (1.0 + x.norm()) && ellipsoid.contains(x, 1e-10)) break;
  }
  return x;
}

IntersectionResult confidence_intersection(const BallConfidence& ball, const EllipsoidConfidence& ellipsoid,
                                           const std::vector<RealVector>& candidates, RandomSource& rng,
                                           const IntersectionOptions& options) {
  IntersectionResult out;
  out.values.reserve(candidates.size());
  const bool ball_unbounded = std::isinf(ball.radius);

  auto ellipsoid_only = [&] {
    for (const auto& x : candidates) out.values.push_back(ellipsoid.optimistic_value(x));
  };
  if (ball_unbounded) {
    ellipsoid_only();
    return out;
  }
  const RealVector nearest = ellipsoid.project(ball.center);
  if ((nearest - ball.center).norm() > ball.radius + 1e-12) {
    out.empty = true;
    ellipsoid_only();
    return out;
  }
  if (options.allow_shortcuts) {
    const RealVector diff = ball.center - ellipsoid.center();
    const double v_norm = std::sqrt(diff.dot(ellipsoid.shape() * diff));
    if (v_norm + ball.radius * std::sqrt(ellipsoid.max_eigenvalue()) <= ellipsoid.radius()) {
      for (const auto& x : candidates) out.values.push_back(ball.optimistic_value(x));
      return out;
    }
    if (diff.norm() + ellipsoid.radius() / std::sqrt(ellipsoid.min_eigenvalue()) <= ball.radius) {
      ellipsoid_only();
      return out;
    }
  }

  const double step = std::max(ball.radius, 1e-12);
  for (const auto& x : candidates) {
    const double xn = x.norm();
    if (xn == 0.0) {
      out.values.push_back(0.0);
      continue;
    }
    std::vector<RealVector> starts;
    starts.push_back(ball.center + ball.radius * x / xn);
    starts.push_back(ellipsoid.maximizer(x));
    while (static_cast<int>(starts.size()) < std::max(options.restarts, 1)) {
      starts.push_back(ball.center + ball.radius * sample_uniform_ball(rng, x.size()));
    }
    starts.resize(static_cast<std::size_t>(std::max(options.restarts, 1)));
    double best = -std::numeric_limits<double>::infinity();
    for (auto& theta : starts) {
      theta = project_to_intersection(ball, ellipsoid, theta);
      for (int it = 0; it < options.iterations; ++it) {
        theta = project_to_intersection(ball, ellipsoid, theta + (step / xn) * x);
      }
      best = std::max(best, theta.dot(x));
    }
    out.values.push_back(best);
  }
  return out;
}

}  // namespace stackbandit
