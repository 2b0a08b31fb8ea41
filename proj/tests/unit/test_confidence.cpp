#include <doctest.h>

#include <stackbandit/confidence.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "unit/oracles.hpp"

using namespace stackbandit;
using namespace stackbandit::testing;

namespace {

RealMatrix random_spd(RandomSource& rng, Eigen::Index d, double lo, double hi) {
  RealMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  }
  const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(g).householderQ();
  RealVector ev(d);
  for (Eigen::Index i = 0; i < d; ++i) ev(i) = lo + (hi - lo) * rng.uniform();
  return q * ev.asDiagonal() * q.transpose();
}

// V^{-1/2} by eigendecomposition, for boundary parameterization.
RealMatrix inverse_sqrt(const RealMatrix& v) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(v);
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

// sup of theta.x over ball ∩ ellipsoid by sampling both boundary surfaces and
// keeping the samples that lie in the other set. Returns -inf if no sample is
// feasible.
double sampled_intersection_sup(const BallConfidence& ball, const EllipsoidConfidence& ell, const RealVector& x,
                                RandomSource& rng, int samples) {
  const RealMatrix m = ell.radius() * inverse_sqrt(ell.shape());
  double best = -std::numeric_limits<double>::infinity();
  const Eigen::Index d = x.size();
  for (int i = 0; i < samples; ++i) {
    const RealVector u = unit_gaussian(rng, d);
    const RealVector pe = ell.center() + m * u;
    if ((pe - ball.center).norm() <= ball.radius) best = std::max(best, pe.dot(x));
    const RealVector pb = ball.center + ball.radius * u;
    if (ell.contains(pb, 0.0)) best = std::max(best, pb.dot(x));
  }
  return best;
}

// Exact sup of theta.x over ball ∩ ellipsoid through the Lagrangian dual
// min_{l1, l2 >= 0} g(l1, l2), which is tight under Slater's condition. g is
// jointly convex, so nested golden-section searches find its minimum.
double dual_intersection_sup(const BallConfidence& ball, const EllipsoidConfidence& ell, const RealVector& x) {
  const RealMatrix& v = ell.shape();
  const Eigen::Index d = x.size();
  auto g = [&](double l1, double l2) {
    if (l1 + l2 <= 0.0) return std::numeric_limits<double>::infinity();
    const RealMatrix a = l1 * RealMatrix::Identity(d, d) + l2 * v;
    const RealVector t = a.ldlt().solve(RealVector(0.5 * x + l1 * ball.center + l2 * (v * ell.center())));
    const RealVector db = t - ball.center;
    const RealVector de = t - ell.center();
    return x.dot(t) - l1 * (db.squaredNorm() - ball.radius * ball.radius) -
           l2 * (de.dot(v * de) - ell.radius() * ell.radius());
  };
  auto inner = [&](double l1) {
    return -maximize_concave([&](double l2) { return -g(l1, l2); }, 0.0, 200.0);
  };
  return -maximize_concave([&](double l1) { return -inner(l1); }, 0.0, 200.0);
}

}  // namespace

TEST_SUITE("confidence") {

TEST_CASE("ball membership and optimism") {
  const BallConfidence ball{vec({1, 0}), 0.5};
  CHECK(ball.contains(vec({1.3, 0.4})));
  CHECK_FALSE(ball.contains(vec({1.6, 0})));
  CHECK(ball.optimistic_value(vec({0, 2})) == doctest::Approx(1.0));
  const BallConfidence open{vec({0, 0}), std::numeric_limits<double>::infinity()};
  CHECK(open.contains(vec({1e6, 1e6})));
}

TEST_CASE("ellipsoid closed forms agree with direct linear algebra") {
  RandomSource rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(4));
    const RealMatrix v = random_spd(rng, d, 0.5, 5.0);
    const RealVector c = in_ball(rng, d);
    const double r = 0.2 + rng.uniform();
    const EllipsoidConfidence ell(c, v, r);
    const RealVector x = unit_gaussian(rng, d);
    const double w = std::sqrt(x.dot(v.ldlt().solve(x)));
    CHECK(ell.width(x) == doctest::Approx(w).epsilon(1e-10));
    CHECK(ell.optimistic_value(x) == doctest::Approx(c.dot(x) + r * w).epsilon(1e-10));
    const RealVector m = ell.maximizer(x);
    CHECK(ell.contains(m, 1e-9));
    CHECK(m.dot(x) == doctest::Approx(ell.optimistic_value(x)).epsilon(1e-10));
    // No boundary point beats the closed form.
    const RealMatrix s = r * inverse_sqrt(v);
    for (int i = 0; i < 200; ++i) {
      REQUIRE((c + s * unit_gaussian(rng, d)).dot(x) <= ell.optimistic_value(x) + 1e-12);
    }
  }
}

TEST_CASE("ellipsoid rejects invalid shapes") {
  CHECK_THROWS_AS(EllipsoidConfidence(vec({0, 0}), RealMatrix::Identity(3, 3), 1.0), std::invalid_argument);
  RealMatrix bad = RealMatrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(EllipsoidConfidence(vec({0, 0}), bad, 1.0), std::invalid_argument);
}

TEST_CASE("ellipsoid projection is the nearest point") {
  RandomSource rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(3));
    const RealMatrix v = random_spd(rng, d, 0.3, 8.0);
    const EllipsoidConfidence ell(in_ball(rng, d), v, 0.5);
    const RealMatrix s = 0.5 * inverse_sqrt(v);
    const RealVector z = ell.center() + 3.0 * unit_gaussian(rng, d);
    const RealVector p = ell.project(z);
    REQUIRE(ell.contains(p, 1e-9));
    for (int i = 0; i < 2000; ++i) {
      const RealVector y = ell.center() + s * in_ball(rng, d);
      REQUIRE((p - z).norm() <= (y - z).norm() + 1e-9);
    }
    const RealVector inside = ell.center() + 0.5 * s * unit_gaussian(rng, d);
    CHECK((ell.project(inside) - inside).norm() < 1e-15);
  }
}

TEST_CASE("max_norm_point matches a boundary scan in the plane") {
  RandomSource rng(43);
  for (int rep = 0; rep < 100; ++rep) {
    const RealMatrix v = random_spd(rng, 2, 0.2, 6.0);
    const EllipsoidConfidence ell(in_ball(rng, 2) * 0.8, v, 0.3 + rng.uniform());
    const RealMatrix s = ell.radius() * inverse_sqrt(v);
    double best = 0.0;
    for (int i = 0; i < 200000; ++i) {
      const double t = 2.0 * M_PI * i / 200000.0;
      best = std::max(best, (ell.center() + s * vec({std::cos(t), std::sin(t)})).norm());
    }
    const RealVector p = ell.max_norm_point();
    CHECK(ell.contains(p, 1e-9));
    CHECK(p.norm() == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("max_norm_point handles the hard case") {
  // Center orthogonal to the longest axis: the secular equation has no root
  // above the top eigenvalue.
  RealMatrix v = RealMatrix::Identity(3, 3);
  v(0, 0) = 0.25;  // semi-axis 2 along e1
  const EllipsoidConfidence ell(vec({0, 0.1, 0}), v, 1.0);
  const RealVector p = ell.max_norm_point();
  CHECK(ell.contains(p, 1e-9));
  // Best point on the boundary: maximize 4 s^2 + (0.1 + t)^2 over s^2 + t^2 = 1.
  const double oracle = maximize_concave(
      [](double t) {
        const double s2 = 1.0 - t * t;
        return std::sqrt(4.0 * s2 + (0.1 + t) * (0.1 + t));
      },
      -1.0, 1.0);
  CHECK(p.norm() == doctest::Approx(oracle).epsilon(1e-9));
  // Centered ball: every boundary point has norm radius.
  const EllipsoidConfidence round(RealVector::Zero(3), RealMatrix::Identity(3, 3), 0.7);
  CHECK(round.max_norm_point().norm() == doctest::Approx(0.7));
}

TEST_CASE("ridge regression matches the normal equations") {
  RandomSource rng(44);
  const Eigen::Index d = 4;
  RidgeRegression ridge(d, 1.0);
  RealMatrix gram = RealMatrix::Identity(d, d);
  RealVector xty = RealVector::Zero(d);
  const RealVector theta = unit_gaussian(rng, d);
  // Cross the periodic refactorization.
  for (int i = 0; i < 5000; ++i) {
    const RealVector x = unit_gaussian(rng, d);
    const double y = theta.dot(x) + 0.1 * rng.normal();
    ridge.add(x, y);
    gram += x * x.transpose();
    xty += y * x;
  }
  CHECK(ridge.count() == 5000);
  CHECK((ridge.gram() - gram).norm() < 1e-8);
  CHECK((ridge.gram_inverse() - gram.inverse()).norm() < 1e-10);
  CHECK((ridge.estimate() - gram.ldlt().solve(xty)).norm() < 1e-10);
  CHECK((ridge.estimate() - theta).norm() < 0.02);
  const EllipsoidConfidence ell = ridge.confidence(2.0);
  CHECK(ell.min_eigenvalue() >= 1.0 - 1e-9);
  CHECK_THROWS_AS(RidgeRegression(3, 0.0), std::invalid_argument);
}

TEST_CASE("linear confidence radius formula") {
  const double r = linear_confidence_radius(0.2, 5, 100, 1.0, 0.01);
  CHECK(r == doctest::Approx(0.2 * std::sqrt(5.0 * std::log(101.0 / 0.01)) + 1.0));
  double prev = 0.0;
  for (std::size_t n = 0; n < 10000; n += 37) {
    const double b = linear_confidence_radius(0.1, 3, n, 1.0, 1e-4);
    REQUIRE(b >= prev);
    prev = b;
  }
  CHECK_THROWS_AS(linear_confidence_radius(0.1, 3, 1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("unbounded ball reduces to the ellipsoid") {
  RandomSource rng(45);
  const EllipsoidConfidence ell(vec({0.2, -0.1, 0.3}), random_spd(rng, 3, 0.5, 3.0), 0.4);
  std::vector<RealVector> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(unit_gaussian(rng, 3));
  const auto res = confidence_intersection(BallConfidence{vec({0, 0, 0})}, ell, xs, rng);
  CHECK_FALSE(res.empty);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(res.values[i] == ell.optimistic_value(xs[i]));
}

TEST_CASE("zero-radius ball returns the linear value") {
  RandomSource rng(46);
  const RealVector theta = unit_gaussian(rng, 3);
  const EllipsoidConfidence ell(theta + 0.05 * unit_gaussian(rng, 3), random_spd(rng, 3, 0.5, 3.0), 1.0);
  REQUIRE(ell.contains(theta));
  std::vector<RealVector> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(unit_gaussian(rng, 3));
  const auto res = confidence_intersection(BallConfidence{theta, 0.0}, ell, xs, rng);
  CHECK_FALSE(res.empty);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(res.values[i] == doctest::Approx(theta.dot(xs[i])).epsilon(1e-12));
}

TEST_CASE("disjoint sets fall back to the ellipsoid and flag the round") {
  RandomSource rng(47);
  const EllipsoidConfidence ell(vec({0, 0, 0}), RealMatrix::Identity(3, 3), 0.5);
  const std::vector<RealVector> xs = {e(3, 0), e(3, 2)};
  const auto res = confidence_intersection(BallConfidence{vec({2, 0, 0}), 0.5}, ell, xs, rng);
  CHECK(res.empty);
  CHECK(res.values[0] == doctest::Approx(0.5));
  CHECK(res.values[1] == doctest::Approx(0.5));
}

TEST_CASE("projected ascent matches the dual optimum and beats sampling") {
  RandomSource rng(48);
  int general = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const RealMatrix v = random_spd(rng, 3, 1.0, 10.0);
    const EllipsoidConfidence ell(0.3 * in_ball(rng, 3), v, 0.8);
    // Ball centered near the ellipsoid boundary so that neither set contains
    // the other.
    const RealVector c = ell.maximizer(unit_gaussian(rng, 3));
    const BallConfidence ball{c, 0.15 + 0.2 * rng.uniform()};
    const std::vector<RealVector> xs = {unit_gaussian(rng, 3), unit_gaussian(rng, 3)};
    IntersectionOptions options;
    options.allow_shortcuts = false;
    const auto res = confidence_intersection(ball, ell, xs, rng, options);
    REQUIRE_FALSE(res.empty);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double sampled = sampled_intersection_sup(ball, ell, xs[i], rng, 500000);
      const double exact = dual_intersection_sup(ball, ell, xs[i]);
      CAPTURE(rep);
      CHECK(std::abs(res.values[i] - exact) <= 1e-6);
      // Sampled points are feasible, so they bound the supremum from below;
      // boundary sampling undershoots a maximum on the intersection curve.
      CHECK(res.values[i] >= sampled - 1e-9);
      CHECK(res.values[i] - sampled <= 1e-3);
      ++general;
    }
  }
  CHECK(general == 40);
}

TEST_CASE("optimism is valid for parameters in both sets") {
  RandomSource rng(49);
  for (int rep = 0; rep < 50; ++rep) {
    const EllipsoidConfidence ell(0.2 * in_ball(rng, 4), random_spd(rng, 4, 1.0, 5.0), 0.6);
    const BallConfidence ball{ell.center() + 0.2 * unit_gaussian(rng, 4), 0.3};
    const RealVector theta = project_to_intersection(ball, ell, ball.center + 0.1 * unit_gaussian(rng, 4));
    REQUIRE(ell.contains(theta, 1e-8));
    REQUIRE((theta - ball.center).norm() <= ball.radius + 1e-8);
    std::vector<RealVector> xs;
    for (int i = 0; i < 10; ++i) xs.push_back(unit_gaussian(rng, 4));
    const auto res = confidence_intersection(ball, ell, xs, rng);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(res.values[i] >= theta.dot(xs[i]) - 1e-9);
  }
}

TEST_CASE("containment shortcuts agree with projected ascent") {
  RandomSource rng(50);
  const EllipsoidConfidence ell(vec({0, 0, 0}), RealMatrix::Identity(3, 3), 1.0);
  const std::vector<RealVector> xs = {unit_gaussian(rng, 3), unit_gaussian(rng, 3)};
  IntersectionOptions slow;
  slow.allow_shortcuts = false;
  for (const BallConfidence& ball : {BallConfidence{vec({0.1, 0, 0}), 0.3}, BallConfidence{vec({0.1, 0, 0}), 5.0}}) {
    const auto fast = confidence_intersection(ball, ell, xs, rng);
    const auto full = confidence_intersection(ball, ell, xs, rng, slow);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(fast.values[i] == doctest::Approx(full.values[i]).epsilon(1e-6));
  }
}

}
