#include <doctest.h>

#include <stackbandit/envs.hpp>

#include <cmath>
#include <vector>

#include "unit/oracles.hpp"

using namespace stackbandit;
using namespace stackbandit::testing;

TEST_SUITE("envs") {

TEST_CASE("variant names round-trip") {
  for (Variant v : {Variant::ReluCurse, Variant::Imitation, Variant::ExpertGuided, Variant::Polynomial,
                    Variant::OptimismTrap}) {
    CHECK(variant_from_string(to_string(v)) == v);
  }
  CHECK(variant_from_string("relu-curse") == Variant::ReluCurse);
  CHECK(variant_from_string("OptimismTrap") == Variant::OptimismTrap);
  CHECK_THROWS_AS(variant_from_string("chess"), std::invalid_argument);
  CHECK(noise_kind_from_string(to_string(NoiseKind::BoundedUniform)) == NoiseKind::BoundedUniform);
}

TEST_CASE("game specs reject bad shapes") {
  CHECK_THROWS_AS(GameSpec::relu_curse(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec::relu_curse(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec::expert_guided(4, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec::polynomial(3, 0), std::invalid_argument);
  CHECK(GameSpec::relu_curse(5, 0.5).leader_dim() == 4);
  CHECK(GameSpec::optimism_trap(5, 0.5).follower_dim() == 5);
  CHECK(GameSpec::imitation(5).follower_dim() == 5);
}

TEST_CASE("parameter membership is checked") {
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  CHECK_THROWS_AS(make_theta(relu, vec({0.5, 0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(make_theta(relu, vec({1, 0})), std::invalid_argument);
  const GameSpec poly = GameSpec::polynomial(3, 2);
  CHECK_NOTHROW(make_theta(poly, vec({0.3, 0.1})));
  CHECK_THROWS_AS(make_theta(poly, vec({1.1, 0})), std::invalid_argument);
  const GameSpec eg = GameSpec::expert_guided(2, 0.5, 0.9);
  CHECK_THROWS_AS(make_theta(eg, vec({1, 0}), vec({0, 1})), std::invalid_argument);
  CHECK_NOTHROW(make_theta(eg, vec({1, 0}), vec({1, 0})));
}

TEST_CASE("mean_reward examples") {
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  CHECK(mean_reward(relu, make_theta(relu, e(3, 0)), e(3, 0), vec({0})) == doctest::Approx(1.0));
  const GameSpec im = GameSpec::imitation(3);
  CHECK(mean_reward(im, make_theta(im, e(3, 0)), e(3, 0), e(3, 0)) == doctest::Approx(2.0));
  const GameSpec poly = GameSpec::polynomial(2, 1);
  CHECK(mean_reward(poly, make_theta(poly, vec({1})), vec({0.5}), vec({0.5})) == doctest::Approx(0.25));
}

TEST_CASE("mean_reward equals the feature inner product") {
  RandomSource rng(21);
  for (const GameSpec& spec : all_variants(4)) {
    for (int i = 0; i < 2000; ++i) {
      const Theta th = random_theta(spec, rng);
      const RealVector a = random_action(spec, rng);
      const RealVector b = random_response(spec, rng);
      CAPTURE(to_string(spec.variant));
      REQUIRE(std::abs(mean_reward(spec, th, a, b) - oracle_reward(spec, th, a, b)) < 1e-12);
    }
  }
}

TEST_CASE("domain violations are rejected") {
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  const Theta th = make_theta(relu, e(3, 0));
  CHECK_THROWS_AS(mean_reward(relu, th, vec({2, 0, 0}), vec({0})), std::invalid_argument);
  CHECK_THROWS_AS(mean_reward(relu, th, e(3, 0), vec({1.5})), std::invalid_argument);
  CHECK_THROWS_AS(best_response(relu, th, vec({1, 0})), std::invalid_argument);
  const GameSpec im = GameSpec::imitation(3);
  CHECK_THROWS_AS(hbar(im, make_theta(im, e(3, 0)), vec({0.5, 0, 0})), std::invalid_argument);
}

TEST_CASE("best_response examples") {
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  const Theta th = make_theta(relu, e(3, 0));
  CHECK(best_response(relu, th, -e(3, 0))(0) == 1.0);
  // Tie at the threshold goes to the zero response.
  CHECK(best_response(relu, th, 0.5 * e(3, 0))(0) == 0.0);
  const GameSpec poly = GameSpec::polynomial(2, 2);
  CHECK(best_response(poly, make_theta(poly, vec({1})), vec({0}))(0) == 0.0);
  const GameSpec trap = GameSpec::optimism_trap(4, 0.3);
  const RealVector b = best_response(trap, make_theta(trap, 0.9 * e(3, 0)), RealVector::Zero(3));
  CHECK((b - vec({1, 0, 0, 0})).norm() < 1e-15);
}

TEST_CASE("best_response_grid examples") {
  const GameSpec im = GameSpec::imitation(2);
  const RealVector b = best_response_grid(im, make_theta(im, vec({0, 1})), vec({1, 0}), 0.01);
  CHECK((b - vec({0, 1})).norm() <= 0.02);
  const GameSpec poly = GameSpec::polynomial(2, 1);
  CHECK(best_response_grid(poly, make_theta(poly, vec({0.8})), vec({1}), 1e-3)(0) == doctest::Approx(0.8).epsilon(1e-3));
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  RandomSource rng(22);
  const Theta th = random_theta(relu, rng);
  RealVector a = 0.2 * th.leader;
  CHECK(best_response_grid(relu, th, a, 0.01)(0) == 1.0);
  const GameSpec trap = GameSpec::optimism_trap(4, 0.3);
  const RealVector g = best_response_grid(trap, make_theta(trap, 0.9 * e(3, 0)), RealVector::Zero(3), 0.05);
  CHECK((g - vec({1, 0, 0, 0})).norm() <= 0.05 * 2.0);
  CHECK_THROWS_AS(best_response_grid(GameSpec::imitation(5), make_theta(GameSpec::imitation(5), e(5, 0)), e(5, 0), 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(best_response_grid(im, make_theta(im, vec({0, 1})), vec({1, 0}), 0.6), std::invalid_argument);
}

TEST_CASE("best response beats random responses") {
  RandomSource rng(23);
  for (const GameSpec& spec : all_variants(5)) {
    for (int i = 0; i < 300; ++i) {
      const Theta th = random_theta_any(spec, rng);
      const RealVector a = random_action(spec, rng);
      const RealVector br = best_response(spec, th, a);
      REQUIRE(in_follower_domain(spec, br));
      const double best = oracle_reward(spec, th, a, br);
      for (int j = 0; j < 100; ++j) {
        CAPTURE(to_string(spec.variant));
        REQUIRE(oracle_reward(spec, th, a, random_response(spec, rng)) <= best + 1e-12);
      }
    }
  }
}

TEST_CASE("best response is within Lipschitz slack of the grid maximum") {
  RandomSource rng(24);
  std::vector<GameSpec> specs = {GameSpec::relu_curse(6, 0.4), GameSpec::polynomial(4, 2), GameSpec::imitation(3),
                                 GameSpec::expert_guided(3, 0.5, 0.6), GameSpec::optimism_trap(3, 0.5)};
  for (const GameSpec& spec : specs) {
    const ResponseGrid grid(spec, 0.05);
    for (int i = 0; i < 100; ++i) {
      const Theta th = random_theta_any(spec, rng);
      const RealVector a = random_action(spec, rng);
      const double closed = mean_reward(spec, th, a, best_response(spec, th, a));
      const double gridded = mean_reward(spec, th, a, grid.argmax(th, a));
      CAPTURE(to_string(spec.variant));
      CHECK(closed >= gridded - 1e-12);
      CHECK(closed <= gridded + grid.value_slack());
    }
  }
}

TEST_CASE("hbar examples and consistency") {
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  const Theta th = make_theta(relu, e(3, 0));
  CHECK(hbar(relu, th, 0.3 * e(3, 0)) == doctest::Approx(0.5));
  const GameSpec im = GameSpec::imitation(4);
  const Theta ti = make_theta(im, project_to_sphere(vec({1, 2, 3, 4})));
  CHECK(hbar(im, ti, ti.leader) == doctest::Approx(2.0));
  const GameSpec poly = GameSpec::polynomial(3, 2);
  CHECK(hbar(poly, make_theta(poly, e(2, 0)), vec({0.5, 0.3})) == doctest::Approx(0.0625));

  RandomSource rng(25);
  for (const GameSpec& spec : all_variants(6)) {
    for (int i = 0; i < 10000; ++i) {
      const Theta t = random_theta_any(spec, rng);
      const RealVector a = random_action(spec, rng);
      const double h = hbar(spec, t, a);
      CAPTURE(to_string(spec.variant));
      REQUIRE(std::abs(h - mean_reward(spec, t, a, best_response(spec, t, a))) <= 1e-9);
      const auto [lo, hi] = reward_range(spec);
      REQUIRE(h >= lo - 1e-12);
      REQUIRE(h <= hi + 1e-12);
    }
  }
}

TEST_CASE("optimal action maximizes hbar") {
  RandomSource rng(26);
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  const Theta tr = make_theta(relu, e(3, 1));
  CHECK(optimal_action(relu, tr) == e(3, 1));
  CHECK(hbar(relu, tr, optimal_action(relu, tr)) == doctest::Approx(1.0));
  for (const GameSpec& spec : all_variants(5)) {
    const Theta t = random_theta(spec, rng);
    const RealVector star = optimal_action(spec, t);
    REQUIRE(in_leader_domain(spec, star));
    const double best = hbar(spec, t, star);
    for (int i = 0; i < 10000; ++i) {
      CAPTURE(to_string(spec.variant));
      REQUIRE(hbar(spec, t, random_action(spec, rng)) <= best + 1e-12);
    }
  }
  const GameSpec poly = GameSpec::polynomial(3, 1);
  CHECK_THROWS_AS(optimal_action(poly, make_theta(poly, vec({0.5, 0}))), std::invalid_argument);
}

TEST_CASE("relu curse hides the parameter below the threshold") {
  RandomSource rng(27);
  const GameSpec spec = GameSpec::relu_curse(8, 0.5);
  for (int i = 0; i < 10000; ++i) {
    const Theta t = random_theta(spec, rng);
    const RealVector a = random_action(spec, rng);
    if (t.leader.dot(a) < 0.5) {
      REQUIRE(best_response(spec, t, a)(0) == 1.0);
      REQUIRE(hbar(spec, t, a) == 0.5);
    }
  }
}

TEST_CASE("polynomial best-response value is the convex conjugate maximum") {
  RandomSource rng(28);
  for (int k = 1; k <= 3; ++k) {
    const GameSpec spec = GameSpec::polynomial(4, k);
    for (int i = 0; i < 1000; ++i) {
      const Theta t = random_theta_any(spec, rng);
      const RealVector a = random_action(spec, rng);
      const double x = t.leader.dot(a);
      const double sup = maximize_concave([&](double b) { return oracle_reward(spec, t, a, vec({b})); }, -1.0, 1.0);
      CAPTURE(k);
      REQUIRE(std::abs(sup - std::pow(x, 2 * k)) <= 1e-9);
      REQUIRE(std::abs(hbar(spec, t, a) - std::pow(x, 2 * k)) <= 1e-12);
    }
  }
}

TEST_CASE("polynomial hbar is Lipschitz in the best response") {
  RandomSource rng(29);
  for (int k = 1; k <= 3; ++k) {
    const GameSpec spec = GameSpec::polynomial(4, k);
    const double lip = 2.0 * k / (2.0 * k - 1.0);
    for (int i = 0; i < 10000; ++i) {
      const Theta t = random_theta(spec, rng);
      const RealVector a = random_action(spec, rng);
      const RealVector a2 = random_action(spec, rng);
      const double dh = std::abs(hbar(spec, t, a) - hbar(spec, t, a2));
      const double db = std::abs(best_response(spec, t, a)(0) - best_response(spec, t, a2)(0));
      REQUIRE(dh <= lip * db + 1e-9);
    }
  }
}

TEST_CASE("optimism trap matches the relu curse on the sphere") {
  RandomSource rng(30);
  const GameSpec trap = GameSpec::optimism_trap(6, 0.4);
  const GameSpec relu = GameSpec::relu_curse(6, 0.4);
  for (int i = 0; i < 5000; ++i) {
    const RealVector th = sample_uniform_sphere(rng, 5);
    const RealVector a = sample_uniform_sphere(rng, 5);
    const Theta tt = make_theta(trap, th);
    const Theta tr = make_theta(relu, th);
    REQUIRE(std::abs(hbar(trap, tt, a) - hbar(relu, tr, a)) < 1e-12);
    const RealVector bt = best_response(trap, tt, a);
    REQUIRE(bt.head(5).norm() == 0.0);
    REQUIRE(bt(5) == best_response(relu, tr, a)(0));
  }
}

TEST_CASE("optimism trap interior value at the origin") {
  const GameSpec trap = GameSpec::optimism_trap(5, 0.5);
  RandomSource rng(31);
  const Theta t = random_theta(trap, rng);
  CHECK(hbar(trap, t, RealVector::Zero(4)) == doctest::Approx(0.5));
  const RealVector b = best_response(trap, t, RealVector::Zero(4));
  CHECK((b.head(4) - t.leader).norm() < 1e-12);
}

TEST_CASE("noiseless step is exact and stepping is deterministic") {
  const GameSpec im = GameSpec::imitation(3);
  const Theta t = make_theta(im, project_to_sphere(vec({1, -1, 2})));
  RandomSource rng(32);
  const RealVector a = project_to_sphere(vec({0, 1, 0}));
  const StepOutcome out = step(im, t, NoiseSpec{}, a, rng);
  CHECK(out.b_obs == t.leader);
  CHECK(out.b_true == t.leader);
  CHECK(std::abs(out.reward - (t.leader.dot(a) + 1.0)) < 1e-15);

  const NoiseSpec noise{0.3, 0.2, NoiseKind::Gaussian};
  RandomSource r1(33);
  RandomSource r2(33);
  const StepOutcome x = step(im, t, noise, a, r1);
  const StepOutcome y = step(im, t, noise, a, r2);
  CHECK(x.b_obs == y.b_obs);
  CHECK(x.reward == y.reward);
}

TEST_CASE("observed responses average to the best response") {
  for (NoiseKind kind : {NoiseKind::Gaussian, NoiseKind::BoundedUniform}) {
    const GameSpec im = GameSpec::imitation(3);
    const Theta t = make_theta(im, project_to_sphere(vec({1, 2, 2})));
    const NoiseSpec noise{0.0, 0.1, kind};
    RandomSource rng(34);
    RealVector sum = RealVector::Zero(3);
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += step(im, t, noise, e(3, 0), rng).b_obs;
    CHECK(((sum / n) - t.leader).cwiseAbs().maxCoeff() <= 0.005);
  }
}

TEST_CASE("bounded noise stays bounded with the declared variance") {
  const NoiseSpec noise{0.5, 0.0, NoiseKind::BoundedUniform};
  RandomSource rng(35);
  double s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = noise.draw(rng, 0.5);
    REQUIRE(std::abs(z) <= 0.5 * std::sqrt(3.0));
    s2 += z * z;
  }
  CHECK(s2 / n == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("responses are not clipped to the response set") {
  const GameSpec relu = GameSpec::relu_curse(4, 0.5);
  const Theta t = make_theta(relu, e(3, 0));
  RandomSource rng(36);
  bool above = false;
  for (int i = 0; i < 200; ++i) above |= step(relu, t, NoiseSpec{0.0, 0.5}, -e(3, 0), rng).b_obs(0) > 1.0;
  CHECK(above);
}

}
