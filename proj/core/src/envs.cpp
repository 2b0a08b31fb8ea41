#include "stackbandit/envs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stackbandit {

namespace {

constexpr double kTol = 1e-9;

std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

double odd_power(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void require_dim(const RealVector& v, Eigen::Index dim, std::string_view what) {
  if (v.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(dim) + ", got " +
                                std::to_string(v.size()));
  }
}

void require_leader(const GameSpec& spec, const RealVector& a, std::string_view what) {
  require_finite(a, what);
  if (!in_leader_domain(spec, a)) {
    throw std::invalid_argument(std::string(what) + ": leader action outside the action set");
  }
}

void require_follower(const GameSpec& spec, const RealVector& b, std::string_view what) {
  require_finite(b, what);
  if (!in_follower_domain(spec, b)) {
    throw std::invalid_argument(std::string(what) + ": follower response outside the response set");
  }
}

// Mean reward without domain checks; b points at follower_dim() doubles.
double reward_unchecked(const GameSpec& spec, const Theta& theta, const RealVector& a, const double* b) {
  const Eigen::Index m = spec.follower_dim();
  const Eigen::Map<const RealVector> bv(b, m);
  switch (spec.variant) {
    case Variant::ReluCurse:
      return (1.0 - b[0]) * theta.leader.dot(a) + b[0] * (1.0 - spec.delta);
    case Variant::Imitation:
      return theta.leader.dot(a) + theta.leader.dot(bv);
    case Variant::ExpertGuided:
      return std::max(0.0, theta.leader.dot(a) - spec.delta) + theta.follower.dot(bv);
    case Variant::Polynomial: {
      const double two_k = 2.0 * spec.k;
      // f*(2k b) = (2k-1) |b|^{2k/(2k-1)}
      const double conj = (two_k - 1.0) * std::pow(std::abs(b[0]), two_k / (two_k - 1.0));
      return two_k * b[0] * theta.leader.dot(a) - conj;
    }
    case Variant::OptimismTrap: {
      const double na = a.norm();
      const double bd = b[m - 1];
      const auto bm = bv.head(m - 1);
      return na * ((1.0 - bd) * theta.leader.dot(a) + (1.0 - spec.delta) * (bd - bm.norm())) +
             0.5 * (1.0 - na) * theta.leader.dot(bm);
    }
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::ReluCurse: return "relu_curse";
    case Variant::Imitation: return "imitation";
    case Variant::ExpertGuided: return "expert_guided";
    case Variant::Polynomial: return "polynomial";
    case Variant::OptimismTrap: return "optimism_trap";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  const std::string n = normalize_name(name);
  for (Variant v : {Variant::ReluCurse, Variant::Imitation, Variant::ExpertGuided, Variant::Polynomial,
                    Variant::OptimismTrap}) {
    if (normalize_name(to_string(v)) == n) return v;
  }
  throw std::invalid_argument("unknown game variant '" + std::string(name) + "'");
}

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::Gaussian ? "gaussian" : "bounded_uniform";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  const std::string n = normalize_name(name);
  if (n == "gaussian") return NoiseKind::Gaussian;
  if (n == "boundeduniform" || n == "uniform") return NoiseKind::BoundedUniform;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

GameSpec GameSpec::relu_curse(int d, double delta) {
  GameSpec s;
  s.variant = Variant::ReluCurse;
  s.d = d;
  s.delta = delta;
  s.validate();
  return s;
}

GameSpec GameSpec::imitation(int d) {
  GameSpec s;
  s.variant = Variant::Imitation;
  s.d = d;
  s.validate();
  return s;
}

GameSpec GameSpec::expert_guided(int d, double delta, double zeta) {
  GameSpec s;
  s.variant = Variant::ExpertGuided;
  s.d = d;
  s.delta = delta;
  s.zeta = zeta;
  s.validate();
  return s;
}

GameSpec GameSpec::polynomial(int d, int k) {
  GameSpec s;
  s.variant = Variant::Polynomial;
  s.d = d;
  s.k = k;
  s.validate();
  return s;
}

GameSpec GameSpec::optimism_trap(int d, double delta) {
  GameSpec s;
  s.variant = Variant::OptimismTrap;
  s.d = d;
  s.delta = delta;
  s.validate();
  return s;
}

void GameSpec::validate() const {
  if (d < 2) throw std::invalid_argument("GameSpec: d must be >= 2");
  const bool uses_delta =
      variant == Variant::ReluCurse || variant == Variant::ExpertGuided || variant == Variant::OptimismTrap;
  if (uses_delta && !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("GameSpec: delta must lie in (0, 1)");
  }
  if (variant == Variant::ExpertGuided && !(zeta > 0.0 && zeta < 1.0)) {
    throw std::invalid_argument("GameSpec: zeta must lie in (0, 1)");
  }
  if (variant == Variant::Polynomial && k < 1) throw std::invalid_argument("GameSpec: k must be >= 1");
}

Eigen::Index GameSpec::leader_dim() const {
  switch (variant) {
    case Variant::Imitation:
    case Variant::ExpertGuided:
      return d;
    default:
      return d - 1;
  }
}

Eigen::Index GameSpec::follower_dim() const {
  switch (variant) {
    case Variant::ReluCurse:
    case Variant::Polynomial:
      return 1;
    case Variant::OptimismTrap:
      return d;
    default:
      return d;
  }
}

Eigen::Index GameSpec::parameter_dim() const { return leader_dim(); }

bool GameSpec::leader_on_sphere() const {
  return variant == Variant::Imitation || variant == Variant::ExpertGuided;
}

void validate_theta(const GameSpec& spec, const Theta& theta) {
  spec.validate();
  require_dim(theta.leader, spec.parameter_dim(), "Theta");
  require_finite(theta.leader, "Theta");
  const double n = theta.leader.norm();
  switch (spec.variant) {
    case Variant::ReluCurse:
    case Variant::Imitation:
      if (std::abs(n - 1.0) > kTol) throw std::invalid_argument("Theta: parameter must have unit norm");
      break;
    case Variant::ExpertGuided: {
      require_dim(theta.follower, spec.d, "Theta follower part");
      require_finite(theta.follower, "Theta follower part");
      if (std::abs(n - 1.0) > kTol || std::abs(theta.follower.norm() - 1.0) > kTol) {
        throw std::invalid_argument("Theta: th_a and th_b must have unit norm");
      }
      if (theta.leader.dot(theta.follower) < spec.zeta - kTol) {
        throw std::invalid_argument("Theta: th_a . th_b must be >= zeta");
      }
      break;
    }
    case Variant::Polynomial:
    case Variant::OptimismTrap:
      if (n > 1.0 + kTol) throw std::invalid_argument("Theta: th_{-d} must lie in the unit ball");
      break;
  }
  if (spec.variant != Variant::ExpertGuided && theta.follower.size() != 0) {
    throw std::invalid_argument("Theta: follower part only exists for the expert-guided game");
  }
}

Theta make_theta(const GameSpec& spec, RealVector leader, RealVector follower) {
  Theta t{std::move(leader), std::move(follower)};
  validate_theta(spec, t);
  return t;
}

Theta random_theta(const GameSpec& spec, RandomSource& rng) {
  spec.validate();
  if (spec.variant == Variant::ExpertGuided) {
    RealVector tb = sample_uniform_sphere(rng, spec.d);
    RealVector ta = sample_uniform_cap(rng, tb, spec.zeta);
    return make_theta(spec, std::move(ta), std::move(tb));
  }
  return make_theta(spec, sample_uniform_sphere(rng, spec.parameter_dim()));
}

double NoiseSpec::draw(RandomSource& rng, double sigma) const {
  if (kind == NoiseKind::Gaussian) return sigma * rng.normal();
  return sigma * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
}

bool in_leader_domain(const GameSpec& spec, const RealVector& a, double tol) {
  if (a.size() != spec.leader_dim() || !a.allFinite()) return false;
  const double n = a.norm();
  if (spec.leader_on_sphere()) return std::abs(n - 1.0) <= tol;
  return n <= 1.0 + tol;
}

bool in_follower_domain(const GameSpec& spec, const RealVector& b, double tol) {
  if (b.size() != spec.follower_dim() || !b.allFinite()) return false;
  switch (spec.variant) {
    case Variant::ReluCurse:
      return b(0) >= -tol && b(0) <= 1.0 + tol;
    case Variant::Polynomial:
      return b(0) >= -1.0 - tol && b(0) <= 1.0 + tol;
    case Variant::Imitation:
    case Variant::ExpertGuided:
      return std::abs(b.norm() - 1.0) <= tol;
    case Variant::OptimismTrap: {
      const double bd = b(b.size() - 1);
      return b.head(b.size() - 1).norm() <= 1.0 + tol && bd >= -tol && bd <= 1.0 + tol;
    }
  }
  return false;
}

double mean_reward(const GameSpec& spec, const Theta& theta, const RealVector& a, const RealVector& b) {
  validate_theta(spec, theta);
  require_leader(spec, a, "mean_reward");
  require_follower(spec, b, "mean_reward");
  return reward_unchecked(spec, theta, a, b.data());
}

RealVector best_response(const GameSpec& spec, const Theta& theta, const RealVector& a) {
  validate_theta(spec, theta);
  require_leader(spec, a, "best_response");
  switch (spec.variant) {
    case Variant::ReluCurse: {
      RealVector b(1);
      b(0) = theta.leader.dot(a) < 1.0 - spec.delta ? 1.0 : 0.0;
      return b;
    }
    case Variant::Imitation:
      return theta.leader;
    case Variant::ExpertGuided:
      return theta.follower;
    case Variant::Polynomial: {
      RealVector b(1);
      b(0) = odd_power(theta.leader.dot(a), 2 * spec.k - 1);
      return b;
    }
    case Variant::OptimismTrap: {
      // h is separable in b_d and b_{-d}; each part is maximized on its own.
      const Eigen::Index m = spec.follower_dim();
      RealVector b = RealVector::Zero(m);
      const double na = a.norm();
      const double coef_d = na * ((1.0 - spec.delta) - theta.leader.dot(a));
      if (coef_d > 0.0) b(m - 1) = 1.0;
      const double nt = theta.leader.norm();
      const double coef_mag = 0.5 * (1.0 - na) * nt - na * (1.0 - spec.delta);
      if (nt > 0.0 && coef_mag > 0.0) b.head(m - 1) = theta.leader / nt;
      return b;
    }
  }
  return {};
}

double hbar(const GameSpec& spec, const Theta& theta, const RealVector& a) {
  validate_theta(spec, theta);
  require_leader(spec, a, "hbar");
  const double x = theta.leader.dot(a);
  switch (spec.variant) {
    case Variant::ReluCurse:
      return std::max(1.0 - spec.delta, x);
    case Variant::Imitation:
      return x + theta.leader.squaredNorm();
    case Variant::ExpertGuided:
      return std::max(0.0, x - spec.delta) + theta.follower.squaredNorm();
    case Variant::Polynomial:
      return odd_power(x, 2 * spec.k);
    case Variant::OptimismTrap: {
      const double na = a.norm();
      return na * std::max(x, 1.0 - spec.delta) +
             std::max(0.0, 0.5 * (1.0 - na) * theta.leader.norm() - na * (1.0 - spec.delta));
    }
  }
  return 0.0;
}

RealVector optimal_action(const GameSpec& spec, const Theta& theta) {
  validate_theta(spec, theta);
  if ((spec.variant == Variant::Polynomial || spec.variant == Variant::OptimismTrap) &&
      std::abs(theta.leader.norm() - 1.0) > kTol) {
    throw std::invalid_argument("optimal_action: requires a unit-norm th_{-d}");
  }
  return theta.leader;
}

StepOutcome step(const GameSpec& spec, const Theta& theta, const NoiseSpec& noise, const RealVector& a,
                 RandomSource& rng) {
  StepOutcome out;
  out.b_true = best_response(spec, theta, a);
  out.reward = reward_unchecked(spec, theta, a, out.b_true.data()) + noise.draw(rng, noise.sigma_r);
  out.b_obs = out.b_true;
  for (Eigen::Index i = 0; i < out.b_obs.size(); ++i) out.b_obs(i) += noise.draw(rng, noise.sigma_b);
  return out;
}

double response_lipschitz(const GameSpec& spec) {
  switch (spec.variant) {
    case Variant::ReluCurse: return 2.0;
    case Variant::Imitation: return 1.0;
    case Variant::ExpertGuided: return 1.0;
    case Variant::Polynomial: return 4.0 * spec.k;
    case Variant::OptimismTrap: return 3.0;
  }
  return 0.0;
}

namespace {

std::vector<double> axis_grid(double lo, double hi, double resolution) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / resolution - 1e-12));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

// Calls f(point) for every point of axis^m.
template <typename F>
void for_each_cube_point(const std::vector<double>& axis, Eigen::Index m, F&& f) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  RealVector p(m);
  for (;;) {
    for (Eigen::Index j = 0; j < m; ++j) p(j) = axis[idx[static_cast<std::size_t>(j)]];
    f(p, idx);
    Eigen::Index j = 0;
    while (j < m) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < axis.size()) break;
      i = 0;
      ++j;
    }
    if (j == m) return;
  }
}

}  // namespace

ResponseGrid::ResponseGrid(const GameSpec& spec, double resolution)
    : spec_(spec), resolution_(resolution), dim_(spec.follower_dim()) {
  spec.validate();
  if (!(resolution > 0.0 && resolution <= 0.5)) {
    throw std::invalid_argument("ResponseGrid: resolution must lie in (0, 0.5]");
  }
  if (dim_ > kMaxFollowerDim) {
    throw std::invalid_argument("ResponseGrid: follower dimension " + std::to_string(dim_) +
                                " exceeds the grid limit of " + std::to_string(kMaxFollowerDim));
  }
  switch (spec.variant) {
    case Variant::ReluCurse:
      flat_ = axis_grid(0.0, 1.0, resolution);
      break;
    case Variant::Polynomial:
      flat_ = axis_grid(-1.0, 1.0, resolution);
      break;
    case Variant::Imitation:
    case Variant::ExpertGuided: {
      const auto axis = axis_grid(-1.0, 1.0, resolution);
      const std::size_t last = axis.size() - 1;
      for_each_cube_point(axis, dim_, [&](const RealVector& p, const std::vector<std::size_t>& idx) {
        const bool on_surface = std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return i == 0 || i == last; });
        if (!on_surface) return;
        const RealVector u = p / p.norm();
        flat_.insert(flat_.end(), u.data(), u.data() + u.size());
      });
      break;
    }
    case Variant::OptimismTrap: {
      const auto axis = axis_grid(-1.0, 1.0, resolution);
      const auto tail = axis_grid(0.0, 1.0, resolution);
      std::vector<double> ball;
      for_each_cube_point(axis, dim_ - 1, [&](const RealVector& p, const std::vector<std::size_t>&) {
        if (p.norm() <= 1.0 + 1e-12) ball.insert(ball.end(), p.data(), p.data() + p.size());
      });
      const std::size_t nb = ball.size() / static_cast<std::size_t>(dim_ - 1);
      flat_.reserve(nb * tail.size() * static_cast<std::size_t>(dim_));
      for (std::size_t i = 0; i < nb; ++i) {
        for (double bd : tail) {
          flat_.insert(flat_.end(), ball.begin() + static_cast<std::ptrdiff_t>(i * (dim_ - 1)),
                       ball.begin() + static_cast<std::ptrdiff_t>((i + 1) * (dim_ - 1)));
          flat_.push_back(bd);
        }
      }
      break;
    }
  }
  count_ = flat_.size() / static_cast<std::size_t>(dim_);
}

double ResponseGrid::value_slack() const {
  return response_lipschitz(spec_) * resolution_ * std::sqrt(static_cast<double>(dim_));
}

RealVector ResponseGrid::argmax(const Theta& theta, const RealVector& a) const {
  validate_theta(spec_, theta);
  require_leader(spec_, a, "best_response_grid");
  const auto m = static_cast<std::size_t>(dim_);
  const double x = theta.leader.dot(a);
  const double na = a.norm();
  const double keep = 1.0 - spec_.delta;
  // Per-query constants are hoisted; the per-point work is the reward formula.
  auto value = [&](const double* b) -> double {
    switch (spec_.variant) {
      case Variant::ReluCurse:
        return (1.0 - b[0]) * x + b[0] * keep;
      case Variant::OptimismTrap: {
        double dot = 0.0;
        double sq = 0.0;
        for (std::size_t j = 0; j + 1 < m; ++j) {
          dot += theta.leader(static_cast<Eigen::Index>(j)) * b[j];
          sq += b[j] * b[j];
        }
        const double bd = b[m - 1];
        return na * ((1.0 - bd) * x + keep * (bd - std::sqrt(sq))) + 0.5 * (1.0 - na) * dot;
      }
      default:
        return reward_unchecked(spec_, theta, a, b);
    }
  };
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count_; ++i) {
    const double v = value(flat_.data() + i * m);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return Eigen::Map<const RealVector>(flat_.data() + best * m, dim_);
}

RealVector best_response_grid(const GameSpec& spec, const Theta& theta, const RealVector& a,
                              double resolution) {
  return ResponseGrid(spec, resolution).argmax(theta, a);
}

}  // namespace stackbandit
