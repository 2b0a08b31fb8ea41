#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stackbandit/geometry.hpp"
#include "stackbandit/random.hpp"

namespace stackbandit {

/// The five Stackelberg games. In every game the follower is omniscient and
/// best-responds to the leader's action.
///
///   ReluCurse     A = B^{d-1}, B = [0,1],          h = (1-b) th.a + b (1-Delta)
///   Imitation     A = B = S^{d-1},                 h = th.(a + b)
///   ExpertGuided  A = B = S^{d-1},                 h = ReLU(th_a.a - Delta) + th_b.b
///   Polynomial    A = B^{d-1}, B = [-1,1],         h = 2k b th.a - f*(2k b), f(x) = x^{2k}
///   OptimismTrap  A = B^{d-1}, B = B^{d-1}x[0,1],  h = |a| ((1-b_d) th.a + (1-Delta)(b_d - |b_-d|))
///                                                      + (1-|a|)/2 th.b_-d
enum class Variant { ReluCurse, Imitation, ExpertGuided, Polynomial, OptimismTrap };

std::string_view to_string(Variant v);
/// Accepts the names produced by to_string as well as kebab/snake case.
Variant variant_from_string(std::string_view name);

struct GameSpec {
  Variant variant = Variant::Imitation;
  /// Ambient parameter dimension. Leader dimension is d-1 for ReluCurse,
  /// Polynomial and OptimismTrap, and d otherwise.
  int d = 2;
  double delta = 0.5;
  double zeta = 0.5;
  int k = 1;

  static GameSpec relu_curse(int d, double delta);
  static GameSpec imitation(int d);
  static GameSpec expert_guided(int d, double delta, double zeta);
  static GameSpec polynomial(int d, int k);
  static GameSpec optimism_trap(int d, double delta);

  /// Throws std::invalid_argument on out-of-range shape parameters.
  void validate() const;

  Eigen::Index leader_dim() const;
  Eigen::Index follower_dim() const;
  /// Dimension of Theta::leader.
  Eigen::Index parameter_dim() const;
  bool leader_on_sphere() const;
};

/// Game parameter. `leader` holds th_{-d} (ReluCurse, Polynomial, OptimismTrap),
/// th (Imitation) or th_a (ExpertGuided). `follower` holds th_b for
/// ExpertGuided and is empty otherwise. The fixed last coordinate of the
/// ReluCurse, Polynomial and OptimismTrap parameters is implied by the spec.
struct Theta {
  RealVector leader;
  RealVector follower;
};

/// Checks the per-variant membership constraints to 1e-9.
void validate_theta(const GameSpec& spec, const Theta& theta);
Theta make_theta(const GameSpec& spec, RealVector leader, RealVector follower = {});
/// Draws a parameter with unit-norm leader part (and, for ExpertGuided, th_a
/// uniform on the admissible cap around a uniform th_b).
Theta random_theta(const GameSpec& spec, RandomSource& rng);

enum class NoiseKind { Gaussian, BoundedUniform };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view name);

struct NoiseSpec {
  double sigma_r = 0.0;
  double sigma_b = 0.0;
  NoiseKind kind = NoiseKind::Gaussian;

  /// Zero-mean draw with standard deviation sigma. BoundedUniform is uniform
  /// on [-sigma sqrt(3), sigma sqrt(3)].
  double draw(RandomSource& rng, double sigma) const;
};

struct StepOutcome {
  RealVector b_true;
  RealVector b_obs;
  double reward = 0.0;
};

bool in_leader_domain(const GameSpec& spec, const RealVector& a, double tol = 1e-9);
bool in_follower_domain(const GameSpec& spec, const RealVector& b, double tol = 1e-9);

double mean_reward(const GameSpec& spec, const Theta& theta, const RealVector& a, const RealVector& b);

/// Closed-form follower best response. Ties go to the zero response.
RealVector best_response(const GameSpec& spec, const Theta& theta, const RealVector& a);

/// max_b h(a, b) in closed form.
double hbar(const GameSpec& spec, const Theta& theta, const RealVector& a);

/// Leader action maximizing hbar. Polynomial and OptimismTrap need a unit th_{-d}.
RealVector optimal_action(const GameSpec& spec, const Theta& theta);

StepOutcome step(const GameSpec& spec, const Theta& theta, const NoiseSpec& noise, const RealVector& a,
                 RandomSource& rng);

/// Upper bound on |h(a,b) - h(a,b')| / |b - b'| over the follower domain.
double response_lipschitz(const GameSpec& spec);

/// Exhaustive grid over the follower domain, used to verify best_response.
///
/// Intervals use a uniform grid with step <= resolution; spheres use the
/// surface of the cube grid projected radially; the OptimismTrap follower
/// domain is the ball grid times the interval grid.
class ResponseGrid {
 public:
  static constexpr Eigen::Index kMaxFollowerDim = 4;

  ResponseGrid(const GameSpec& spec, double resolution);

  std::size_t size() const { return count_; }
  double resolution() const { return resolution_; }
  /// Largest slack between the grid maximum and the true maximum allowed by
  /// the Lipschitz bound: response_lipschitz * resolution * sqrt(dim).
  double value_slack() const;

  /// First grid point attaining the maximal mean reward.
  RealVector argmax(const Theta& theta, const RealVector& a) const;

 private:
  GameSpec spec_;
  double resolution_;
  Eigen::Index dim_;
  std::size_t count_ = 0;
  std::vector<double> flat_;
};

RealVector best_response_grid(const GameSpec& spec, const Theta& theta, const RealVector& a,
                              double resolution);

}  // namespace stackbandit
