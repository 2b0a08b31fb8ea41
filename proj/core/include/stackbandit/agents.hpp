#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stackbandit/confidence.hpp"
#include "stackbandit/envs.hpp"
#include "stackbandit/geometry.hpp"
#include "stackbandit/random.hpp"

namespace stackbandit {

/// Stateful leader policy. act(t) is called once per round t = 1, 2, ... and
/// is followed by observe() with the played action, the observed (possibly
/// noisy) response and the observed reward. Agents never see the parameter.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual RealVector act(std::size_t t) = 0;
  virtual void observe(const RealVector& a, const RealVector& b_obs, double reward) = 0;
  virtual std::string name() const = 0;
  /// Rounds in which the response and reward confidence sets did not meet.
  virtual std::size_t empty_intersection_count() const { return 0; }
};

/// UCB1 over a finite arm list. Each arm is played once in order, then the
/// arm maximizing mean + c sqrt(log n / n_i) is played, n being the number of
/// completed pulls. Ties go to the lower index.
class Ucb1Agent : public Agent {
 public:
  explicit Ucb1Agent(std::vector<RealVector> arms, double c = 1.4142135623730951);

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return "ucb1"; }

  std::size_t arm_count() const { return arms_.size(); }
  const std::vector<RealVector>& arms() const { return arms_; }
  std::size_t pulls(std::size_t arm) const { return pulls_.at(arm); }
  double mean(std::size_t arm) const;
  std::size_t select() const;

 private:
  std::vector<RealVector> arms_;
  double c_;
  std::vector<std::size_t> pulls_;
  std::vector<double> sums_;
  std::size_t total_ = 0;
  std::size_t last_ = 0;
};

/// Net resolution T^{-1/(d+2)}.
double covering_default_eps(std::size_t horizon, int d);

/// Optimal actions of the parameters in a net over the unit-sphere part of
/// the parameter set, deduplicated at 1e-9, in net order.
std::vector<RealVector> covering_arms(const GameSpec& spec, const Net& net);

struct CoveringOptions {
  /// Unset means covering_default_eps(horizon, spec.d).
  std::optional<double> eps;
  double ucb_c = 1.4142135623730951;
  NetOptions net;
};

/// UCB1 on the optimal actions of a parameter net, using rewards only.
class CoveringAgent : public Agent {
 public:
  CoveringAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng, const CoveringOptions& options = {});

  RealVector act(std::size_t t) override { return ucb_.act(t); }
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override {
    ucb_.observe(a, b_obs, reward);
  }
  std::string name() const override { return "covering"; }

  double eps() const { return eps_; }
  const Ucb1Agent& ucb() const { return ucb_; }

 private:
  double eps_;
  Ucb1Agent ucb_;
};

struct LinUcbOptions {
  double lambda = 1.0;
  /// Confidence level; 0 means 1 / horizon.
  double delta = 0.0;
  double sigma_r = 0.1;
  /// Known constant subtracted from every reward before regression.
  double reward_offset = 0.0;
};

/// Optimistic linear bandit with features x = a. The ridge ellipsoid uses
/// radius linear_confidence_radius(sigma_r, dim, n, lambda, delta) after n
/// observations.
///
/// With a candidate list the agent plays argmax_x center.x + beta |x|_{V^-1}
/// (ties to the lower index). In sphere mode the argmax over the whole unit
/// sphere is taken exactly through EllipsoidConfidence::max_norm_point.
class LinUcbAgent : public Agent {
 public:
  LinUcbAgent(std::vector<RealVector> candidates, std::size_t horizon, const LinUcbOptions& options);
  static LinUcbAgent over_sphere(Eigen::Index dim, std::size_t horizon, const LinUcbOptions& options);

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return sphere_ ? "lin_ucb_sphere" : "lin_ucb"; }

  double beta() const;
  double beta_at(std::size_t n) const;
  const RidgeRegression& regression() const { return ridge_; }
  EllipsoidConfidence confidence() const { return ridge_.confidence(beta()); }
  std::size_t candidate_count() const { return static_cast<std::size_t>(features_.rows()); }
  /// Optimistic value of each candidate at the current state.
  RealVector optimistic_values() const;

 private:
  LinUcbAgent(Eigen::Index dim, std::size_t horizon, const LinUcbOptions& options);

  LinUcbOptions options_;
  bool sphere_ = false;
  RealMatrix features_;
  RidgeRegression ridge_;
};

struct ImitationOptions {
  double sigma_b = 0.1;
  double delta = 0.05;
  double c_alpha = 2.0;
};

/// Imitation-game agent: plays e1, then the projected mean of the observed
/// responses. Maintains the ball of radius alpha / sqrt(n) around that
/// projected mean after n observations, alpha = c_alpha sigma_b
/// sqrt(d + log(T / delta)).
class ImitationAgent : public Agent {
 public:
  ImitationAgent(int d, std::size_t horizon, const ImitationOptions& options);

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return "imitation"; }

  double alpha() const { return alpha_; }
  std::size_t observations() const { return count_; }
  /// Radius is infinite before the first observation.
  BallConfidence ball() const;

 private:
  int d_;
  double alpha_;
  RealVector sum_;
  std::size_t count_ = 0;
};

enum class ExpertMode { Auto, Strong, Weak };

std::string_view to_string(ExpertMode mode);
ExpertMode expert_mode_from_string(std::string_view name);
/// True when 1 - zeta <= (1 - Delta) / 4.
bool expert_strong_condition(const GameSpec& spec);
/// (K sqrt(1 - zeta^2))^{d/(d+2)} T^{-1/(d+2)}
double expert_weak_eps(const GameSpec& spec, std::size_t horizon, double k_const);

struct ExpertOptions {
  ExpertMode mode = ExpertMode::Auto;
  /// Cap-net resolution of the strong mode.
  double eps_lin = 0.05;
  /// Weak-mode resolution; unset means expert_weak_eps with k_const.
  std::optional<double> eps_weak;
  double k_const = 1.0;
  double sigma_r = 0.1;
  double lambda = 1.0;
  double ucb_c = 1.4142135623730951;
  NetOptions net;
};

/// Expert-guided agent. Round 1 plays e1 and reads the expert direction b1
/// from the (noiseless) response. Afterwards every action lies in the cap
/// {a : a.b1 >= zeta}: the strong mode runs a linear bandit on a cap net with
/// reward offset 1 - Delta, the weak mode runs UCB1 on the cap-net points.
class ExpertGuidedAgent : public Agent {
 public:
  ExpertGuidedAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng, const ExpertOptions& options = {});

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override;

  /// Resolved mode (never Auto).
  ExpertMode mode() const { return mode_; }
  const std::optional<RealVector>& expert_direction() const { return b1_; }
  /// Cap-net size after round 1, 0 before.
  std::size_t arm_count() const;
  double eps() const;

 private:
  GameSpec spec_;
  std::size_t horizon_;
  RandomSource rng_;
  ExpertOptions options_;
  ExpertMode mode_;
  std::optional<RealVector> b1_;
  std::unique_ptr<LinUcbAgent> lin_;
  std::unique_ptr<Ucb1Agent> ucb_;
};

struct PolyProxyOptions {
  double rho = 0.2;
};

/// Explore-then-commit for the polynomial game, driven by responses only.
/// Exploration plays uniform unit directions for ceil(rho T) rounds and
/// regresses sign(b) |b|^{1/(2k-1)} on a; afterwards it commits to the
/// normalized least-squares estimate.
class PolyProxyAgent : public Agent {
 public:
  PolyProxyAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng, const PolyProxyOptions& options = {});

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return "poly_proxy"; }

  std::size_t explore_rounds() const { return explore_; }
  /// Least-squares estimate from the observations so far, empty while the
  /// design is rank deficient.
  std::optional<RealVector> estimate() const;
  bool committed() const { return commit_.has_value(); }

 private:
  GameSpec spec_;
  RandomSource rng_;
  std::size_t explore_;
  std::size_t seen_ = 0;
  RealMatrix ata_;
  RealVector atz_;
  std::optional<RealVector> commit_;
};

/// Plays the zero action once, reads th_{-d} off the response and plays its
/// direction from then on.
class ProbeAgent : public Agent {
 public:
  explicit ProbeAgent(const GameSpec& spec);

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return "probe"; }

 private:
  GameSpec spec_;
  std::optional<RealVector> direction_;
};

struct OptimisticSphereOptions {
  double eps = 0.7;
  /// Random unit parameters added to the net points to form the particle set.
  std::size_t extra_particles = 4096;
  NetOptions net;
};

/// Optimism on the trap game. The confidence set is a finite particle set of
/// unit parameters, pruned only when a particle disagrees with the observed
/// threshold response b_d. Each round plays the sphere-net candidate with the
/// largest sup over the particles of hbar, which on the unit sphere equals
/// max(1 - Delta, max_theta theta.a).
class OptimisticSphereAgent : public Agent {
 public:
  OptimisticSphereAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng,
                        const OptimisticSphereOptions& options = {});

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return "optimistic_sphere"; }

  std::size_t candidate_count() const { return candidates_.size(); }
  std::size_t alive_particles() const;
  /// sup over the surviving particles of hbar at an arbitrary leader action.
  double optimistic_value(const RealVector& a) const;

 private:
  void refresh(std::size_t candidate) const;

  GameSpec spec_;
  std::vector<RealVector> candidates_;
  std::vector<RealVector> particles_;
  std::vector<char> alive_;
  mutable std::vector<double> best_dot_;
  mutable std::vector<std::size_t> best_particle_;
  mutable std::vector<char> stale_;
};

struct SideInfoOptions {
  double eps = 0.3;
  ImitationOptions ball;
  double sigma_r = 0.1;
  double lambda = 1.0;
  IntersectionOptions intersection;
  NetOptions net;
};

/// Generic confidence-set agent on the imitation game: optimism over the
/// intersection of the response ball and the reward ellipsoid, maximized over
/// a sphere net.
class SideInfoUcbAgent : public Agent {
 public:
  SideInfoUcbAgent(int d, std::size_t horizon, RandomSource rng, const SideInfoOptions& options = {});

  RealVector act(std::size_t t) override;
  void observe(const RealVector& a, const RealVector& b_obs, double reward) override;
  std::string name() const override { return "side_info_ucb"; }
  std::size_t empty_intersection_count() const override { return empty_; }

 private:
  std::size_t horizon_;
  RandomSource rng_;
  SideInfoOptions options_;
  std::vector<RealVector> candidates_;
  ImitationAgent ball_;
  RidgeRegression ridge_;
  double delta_;
  std::size_t empty_ = 0;
};

/// Plays a fixed action every round.
class FixedActionAgent : public Agent {
 public:
  explicit FixedActionAgent(RealVector action, std::string label = "oracle")
      : action_(std::move(action)), label_(std::move(label)) {}

  RealVector act(std::size_t) override { return action_; }
  void observe(const RealVector&, const RealVector&, double) override {}
  std::string name() const override { return label_; }

 private:
  RealVector action_;
  std::string label_;
};

/// Serializable agent choice. `kind` is one of agent_kinds(); numeric and
/// string parameters are looked up by name, unknown names are rejected.
struct AgentDescriptor {
  std::string kind;
  std::map<std::string, double> params;
  std::map<std::string, std::string> options;
};

std::vector<std::string> agent_kinds();

/// Checks the kind and the parameter and option names without building the
/// agent. Throws std::invalid_argument.
void validate_agent_descriptor(const AgentDescriptor& descriptor);

struct AgentContext {
  GameSpec spec;
  NoiseSpec noise;
  std::size_t horizon = 1;
  /// Only the "oracle" kind reads the parameter.
  const Theta* theta = nullptr;
};

/// Throws std::invalid_argument on unknown kinds or parameters and on
/// agent/variant mismatches. UCB1-based kinds default to the sub-Gaussian
/// exploration constant sqrt(2) sigma_r.
std::unique_ptr<Agent> make_agent(const AgentDescriptor& descriptor, const AgentContext& context, RandomSource rng);

}  // namespace stackbandit
