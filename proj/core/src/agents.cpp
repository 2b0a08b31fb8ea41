#include "stackbandit/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <tuple>
#include <stdexcept>
#include <unordered_set>

namespace stackbandit {

namespace {

void require_variant(const GameSpec& spec, Variant v, const char* agent) {
  if (spec.variant != v) {
    throw std::invalid_argument(std::string(agent) + ": requires the " + std::string(to_string(v)) +
                                " game, got " + std::string(to_string(spec.variant)));
  }
}

// Net over the unit sphere of R^dim; S^0 is the two-point set.
Net unit_sphere_net(Eigen::Index dim, double eps, RandomSource& rng, const NetOptions& options) {
  if (dim == 1) {
    std::vector<RealVector> pts{RealVector::Constant(1, 1.0), RealVector::Constant(1, -1.0)};
    return Net(std::move(pts), eps, SphereDomain{});
  }
  return build_net_sphere(dim, eps, rng, options);
}

// Cap nets around e1 are built once per (d, zeta, eps, options) from a fixed
// seed and shared; agents reflect them onto their own center. This keeps runs
// deterministic regardless of which thread builds first.
const Net& canonical_cap_net(Eigen::Index d, double zeta, double eps, const NetOptions& options) {
  using Key = std::tuple<Eigen::Index, double, double, double, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<Net>> cache;
  const Key key{d, zeta, eps, options.failure_factor, options.max_points};
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (!slot) {
    RandomSource rng(derive_seed(0, "canonical-cap-net"));
    slot = std::make_unique<Net>(build_net_cap(unit_vector(d, 0), zeta, eps, rng, options));
  }
  return *slot;
}

RealVector random_unit(RandomSource& rng, Eigen::Index dim) {
  if (dim == 1) return RealVector::Constant(1, rng.uniform() < 0.5 ? -1.0 : 1.0);
  return sample_uniform_sphere(rng, dim);
}

std::size_t first_argmax(const RealVector& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

struct RoundedKeyHash {
  std::size_t operator()(const std::vector<long long>& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (long long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
    return h;
  }
};

}  // namespace

// ---------------------------------------------------------------- Ucb1Agent

Ucb1Agent::Ucb1Agent(std::vector<RealVector> arms, double c)
    : arms_(std::move(arms)), c_(c), pulls_(arms_.size(), 0), sums_(arms_.size(), 0.0) {
  if (arms_.empty()) throw std::invalid_argument("ucb1: empty arm list");
  if (!(c_ >= 0.0)) throw std::invalid_argument("ucb1: exploration constant must be nonnegative");
}

double Ucb1Agent::mean(std::size_t arm) const {
  const std::size_t n = pulls_.at(arm);
  return n == 0 ? 0.0 : sums_[arm] / static_cast<double>(n);
}

std::size_t Ucb1Agent::select() const {
  if (total_ < arms_.size()) return total_;
  const double log_n = std::log(static_cast<double>(total_));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const double n = static_cast<double>(pulls_[i]);
    const double index = sums_[i] / n + c_ * std::sqrt(log_n / n);
    if (index > best_index) {
      best_index = index;
      best = i;
    }
  }
  return best;
}

RealVector Ucb1Agent::act(std::size_t) {
  last_ = select();
  return arms_[last_];
}

void Ucb1Agent::observe(const RealVector&, const RealVector&, double reward) {
  pulls_[last_] += 1;
  sums_[last_] += reward;
  ++total_;
}

// ------------------------------------------------------------ CoveringAgent

double covering_default_eps(std::size_t horizon, int d) {
  if (horizon < 1) throw std::invalid_argument("covering: horizon must be positive");
  return std::pow(static_cast<double>(horizon), -1.0 / (static_cast<double>(d) + 2.0));
}

std::vector<RealVector> covering_arms(const GameSpec& spec, const Net& net) {
  std::vector<RealVector> arms;
  std::unordered_set<std::vector<long long>, RoundedKeyHash> seen;
  for (const auto& p : net.points()) {
    Theta theta{p, {}};
    if (spec.variant == Variant::ExpertGuided) theta.follower = p;
    RealVector a = optimal_action(spec, theta);
    std::vector<long long> key(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(a(i) * 1e9);
    if (seen.insert(std::move(key)).second) arms.push_back(std::move(a));
  }
  return arms;
}

namespace {

Ucb1Agent make_covering_ucb(const GameSpec& spec, double eps, RandomSource& rng, const CoveringOptions& options) {
  spec.validate();
  const Net net = unit_sphere_net(spec.parameter_dim(), eps, rng, options.net);
  return Ucb1Agent(covering_arms(spec, net), options.ucb_c);
}

}  // namespace

CoveringAgent::CoveringAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng,
                             const CoveringOptions& options)
    : eps_(options.eps.value_or(covering_default_eps(horizon, spec.d))),
      ucb_(make_covering_ucb(spec, eps_, rng, options)) {}

// -------------------------------------------------------------- LinUcbAgent

LinUcbAgent::LinUcbAgent(Eigen::Index dim, std::size_t horizon, const LinUcbOptions& options)
    : options_(options), ridge_(dim, options.lambda) {
  if (options_.delta == 0.0) options_.delta = 1.0 / static_cast<double>(std::max<std::size_t>(horizon, 2));
  if (!(options_.delta > 0.0 && options_.delta < 1.0)) throw std::invalid_argument("lin_ucb: delta must lie in (0, 1)");
  if (!(options_.sigma_r >= 0.0)) throw std::invalid_argument("lin_ucb: sigma_r must be nonnegative");
}

LinUcbAgent::LinUcbAgent(std::vector<RealVector> candidates, std::size_t horizon, const LinUcbOptions& options)
    : LinUcbAgent(candidates.empty() ? 1 : candidates.front().size(), horizon, options) {
  if (candidates.empty()) throw std::invalid_argument("lin_ucb: empty candidate list");
  const Eigen::Index p = candidates.front().size();
  features_.resize(static_cast<Eigen::Index>(candidates.size()), p);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].size() != p) throw std::invalid_argument("lin_ucb: candidate dimension mismatch");
    if (candidates[i].norm() > 1.0 + 1e-9) throw std::invalid_argument("lin_ucb: candidate norm exceeds 1");
    features_.row(static_cast<Eigen::Index>(i)) = candidates[i].transpose();
  }
}

LinUcbAgent LinUcbAgent::over_sphere(Eigen::Index dim, std::size_t horizon, const LinUcbOptions& options) {
  if (dim < 1) throw std::invalid_argument("lin_ucb: dim must be >= 1");
  LinUcbAgent agent(dim, horizon, options);
  agent.sphere_ = true;
  return agent;
}

double LinUcbAgent::beta_at(std::size_t n) const {
  return linear_confidence_radius(options_.sigma_r, ridge_.dim(), n, options_.lambda, options_.delta);
}

double LinUcbAgent::beta() const { return beta_at(ridge_.count()); }

RealVector LinUcbAgent::optimistic_values() const {
  if (sphere_) throw std::logic_error("lin_ucb: sphere mode has no candidate list");
  const RealVector center = ridge_.estimate();
  const RealMatrix xv = features_ * ridge_.gram_inverse();
  const RealVector widths = xv.cwiseProduct(features_).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
  return features_ * center + beta() * widths;
}

RealVector LinUcbAgent::act(std::size_t) {
  if (sphere_) return project_to_sphere(confidence().max_norm_point());
  return features_.row(static_cast<Eigen::Index>(first_argmax(optimistic_values()))).transpose();
}

void LinUcbAgent::observe(const RealVector& a, const RealVector&, double reward) {
  ridge_.add(a, reward - options_.reward_offset);
}

// ----------------------------------------------------------- ImitationAgent

ImitationAgent::ImitationAgent(int d, std::size_t horizon, const ImitationOptions& options)
    : d_(d), sum_(RealVector::Zero(d)) {
  if (d < 2) throw std::invalid_argument("imitation: d must be >= 2");
  if (horizon < 1) throw std::invalid_argument("imitation: horizon must be positive");
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw std::invalid_argument("imitation: delta must lie in (0, 1)");
  if (!(options.sigma_b >= 0.0) || !(options.c_alpha >= 0.0)) {
    throw std::invalid_argument("imitation: sigma_b and c_alpha must be nonnegative");
  }
  alpha_ = options.c_alpha * options.sigma_b *
           std::sqrt(static_cast<double>(d) + std::log(static_cast<double>(horizon) / options.delta));
}

RealVector ImitationAgent::act(std::size_t) {
  if (count_ == 0) return unit_vector(d_, 0);
  return project_to_sphere(sum_ / static_cast<double>(count_));
}

void ImitationAgent::observe(const RealVector&, const RealVector& b_obs, double) {
  if (b_obs.size() != d_) throw std::invalid_argument("imitation: response dimension mismatch");
  sum_ += b_obs;
  ++count_;
}

BallConfidence ImitationAgent::ball() const {
  if (count_ == 0) return BallConfidence{unit_vector(d_, 0), std::numeric_limits<double>::infinity()};
  return BallConfidence{project_to_sphere(sum_ / static_cast<double>(count_)),
                        alpha_ / std::sqrt(static_cast<double>(count_))};
}

// -------------------------------------------------------- ExpertGuidedAgent

std::string_view to_string(ExpertMode mode) {
  switch (mode) {
    case ExpertMode::Auto: return "auto";
    case ExpertMode::Strong: return "strong";
    case ExpertMode::Weak: return "weak";
  }
  return "auto";
}

ExpertMode expert_mode_from_string(std::string_view name) {
  if (name == "auto") return ExpertMode::Auto;
  if (name == "strong") return ExpertMode::Strong;
  if (name == "weak") return ExpertMode::Weak;
  throw std::invalid_argument("unknown expert mode '" + std::string(name) + "'");
}

bool expert_strong_condition(const GameSpec& spec) { return 1.0 - spec.zeta <= (1.0 - spec.delta) / 4.0; }

double expert_weak_eps(const GameSpec& spec, std::size_t horizon, double k_const) {
  if (!(k_const > 0.0)) throw std::invalid_argument("expert_guided: K must be positive");
  const double d = static_cast<double>(spec.d);
  const double c_zeta = std::sqrt(1.0 - spec.zeta * spec.zeta);
  return std::pow(k_const * c_zeta, d / (d + 2.0)) * std::pow(static_cast<double>(horizon), -1.0 / (d + 2.0));
}

ExpertGuidedAgent::ExpertGuidedAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng,
                                     const ExpertOptions& options)
    : spec_(spec), horizon_(horizon), rng_(std::move(rng)), options_(options), mode_(options.mode) {
  require_variant(spec, Variant::ExpertGuided, "expert_guided");
  spec.validate();
  const bool strong_ok = expert_strong_condition(spec);
  if (mode_ == ExpertMode::Auto) mode_ = strong_ok ? ExpertMode::Strong : ExpertMode::Weak;
  if (mode_ == ExpertMode::Strong && !strong_ok) {
    throw std::invalid_argument("expert_guided: strong mode needs 1 - zeta <= (1 - Delta) / 4");
  }
  if (!(options_.eps_lin > 0.0)) throw std::invalid_argument("expert_guided: eps_lin must be positive");
  if (options_.eps_weak && !(*options_.eps_weak > 0.0)) {
    throw std::invalid_argument("expert_guided: eps_weak must be positive");
  }
}

std::string ExpertGuidedAgent::name() const {
  return mode_ == ExpertMode::Strong ? "expert_guided_strong" : "expert_guided_weak";
}

double ExpertGuidedAgent::eps() const {
  if (mode_ == ExpertMode::Strong) return options_.eps_lin;
  return options_.eps_weak.value_or(expert_weak_eps(spec_, horizon_, options_.k_const));
}

std::size_t ExpertGuidedAgent::arm_count() const {
  if (lin_) return lin_->candidate_count();
  if (ucb_) return ucb_->arm_count();
  return 0;
}

RealVector ExpertGuidedAgent::act(std::size_t t) {
  if (!b1_) return unit_vector(spec_.d, 0);
  if (lin_) return lin_->act(t);
  return ucb_->act(t);
}

void ExpertGuidedAgent::observe(const RealVector& a, const RealVector& b_obs, double reward) {
  if (!b1_) {
    if (b_obs.size() != spec_.d) throw std::invalid_argument("expert_guided: response dimension mismatch");
    b1_ = project_to_sphere(b_obs);
    Net net = reflect_cap_net(canonical_cap_net(spec_.d, spec_.zeta, eps(), options_.net), *b1_);
    if (mode_ == ExpertMode::Strong) {
      LinUcbOptions lin;
      lin.lambda = options_.lambda;
      lin.sigma_r = options_.sigma_r;
      lin.reward_offset = 1.0 - spec_.delta;
      lin_ = std::make_unique<LinUcbAgent>(net.points(), horizon_, lin);
    } else {
      ucb_ = std::make_unique<Ucb1Agent>(net.points(), options_.ucb_c);
    }
    return;
  }
  if (lin_) {
    lin_->observe(a, b_obs, reward);
  } else {
    ucb_->observe(a, b_obs, reward);
  }
}

// ----------------------------------------------------------- PolyProxyAgent

PolyProxyAgent::PolyProxyAgent(const GameSpec& spec, std::size_t horizon, RandomSource rng,
                               const PolyProxyOptions& options)
    : spec_(spec), rng_(std::move(rng)) {
  require_variant(spec, Variant::Polynomial, "poly_proxy");
  spec.validate();
  if (!(options.rho > 0.0 && options.rho <= 1.0)) throw std::invalid_argument("poly_proxy: rho must lie in (0, 1]");
  explore_ = static_cast<std::size_t>(std::ceil(options.rho * static_cast<double>(horizon)));
  const Eigen::Index m = spec.leader_dim();
  ata_ = RealMatrix::Zero(m, m);
  atz_ = RealVector::Zero(m);
}

std::optional<RealVector> PolyProxyAgent::estimate() const {
  if (seen_ == 0) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(ata_);
  if (eig.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff())) return std::nullopt;
  return RealVector(ata_.ldlt().solve(atz_));
}

RealVector PolyProxyAgent::act(std::size_t) {
  if (commit_) return *commit_;
  if (seen_ >= explore_) {
    const auto est = estimate();
    if (est && est->norm() > 1e-12) {
      commit_ = *est / est->norm();
      return *commit_;
    }
  }
  return random_unit(rng_, spec_.leader_dim());
}

void PolyProxyAgent::observe(const RealVector& a, const RealVector& b_obs, double) {
  if (commit_) return;
  if (b_obs.size() != 1) throw std::invalid_argument("poly_proxy: response dimension mismatch");
  const double b = b_obs(0);
  const double z = std::copysign(std::pow(std::abs(b), 1.0 / static_cast<double>(2 * spec_.k - 1)), b);
  ata_.noalias() += a * a.transpose();
  atz_ += z * a;
  ++seen_;
}

// --------------------------------------------------------------- ProbeAgent

ProbeAgent::ProbeAgent(const GameSpec& spec) : spec_(spec) {
  require_variant(spec, Variant::OptimismTrap, "probe");
  spec.validate();
}

RealVector ProbeAgent::act(std::size_t) {
  if (direction_) return *direction_;
  return RealVector::Zero(spec_.leader_dim());
}

void ProbeAgent::observe(const RealVector&, const RealVector& b_obs, double) {
  if (direction_) return;
  if (b_obs.size() != spec_.follower_dim()) throw std::invalid_argument("probe: response dimension mismatch");
  const RealVector head = b_obs.head(spec_.leader_dim());
  const double n = head.norm();
  if (!(n > 1e-12)) {
    throw std::runtime_error("probe: zero response to the zero action; environment inconsistent with a unit parameter");
  }
  direction_ = head / n;
}

// ---------------------------------------------------- OptimisticSphereAgent

OptimisticSphereAgent::OptimisticSphereAgent(const GameSpec& spec, std::size_t, RandomSource rng,
                                             const OptimisticSphereOptions& options)
    : spec_(spec) {
  require_variant(spec, Variant::OptimismTrap, "optimistic_sphere");
  spec.validate();
  const Eigen::Index m = spec.leader_dim();
  candidates_ = unit_sphere_net(m, options.eps, rng, options.net).points();
  particles_ = candidates_;
  for (std::size_t i = 0; i < options.extra_particles; ++i) particles_.push_back(random_unit(rng, m));
  alive_.assign(particles_.size(), 1);
  best_dot_.assign(candidates_.size(), 0.0);
  best_particle_.assign(candidates_.size(), 0);
  stale_.assign(candidates_.size(), 1);
}

std::size_t OptimisticSphereAgent::alive_particles() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
}

void OptimisticSphereAgent::refresh(std::size_t c) const {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = particles_.size();
  for (std::size_t j = 0; j < particles_.size(); ++j) {
    if (!alive_[j]) continue;
    const double v = particles_[j].dot(candidates_[c]);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  best_dot_[c] = best;
  best_particle_[c] = arg;
  stale_[c] = 0;
}

double OptimisticSphereAgent::optimistic_value(const RealVector& a) const {
  double best = (1.0 - spec_.delta) * a.norm();  // hbar at the zero parameter
  for (std::size_t j = 0; j < particles_.size(); ++j) {
    if (alive_[j]) best = std::max(best, hbar(spec_, Theta{particles_[j], {}}, a));
  }
  return best;
}

RealVector OptimisticSphereAgent::act(std::size_t) {
  const double floor = 1.0 - spec_.delta;
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    if (stale_[c]) refresh(c);
    const double v = std::max(floor, best_dot_[c]);
    if (v > best_value) {
      best_value = v;
      best = c;
    }
  }
  return candidates_[best];
}

void OptimisticSphereAgent::observe(const RealVector& a, const RealVector& b_obs, double) {
  if (b_obs.size() != spec_.follower_dim()) throw std::invalid_argument("optimistic_sphere: response dimension mismatch");
  const bool observed_one = b_obs(b_obs.size() - 1) > 0.5;
  const double threshold = 1.0 - spec_.delta;
  bool removed = false;
  for (std::size_t j = 0; j < particles_.size(); ++j) {
    if (!alive_[j]) continue;
    const bool predicted_one = particles_[j].dot(a) < threshold;
    if (predicted_one != observed_one) {
      alive_[j] = 0;
      removed = true;
    }
  }
  if (!removed) return;
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    if (best_particle_[c] >= particles_.size() || !alive_[best_particle_[c]]) stale_[c] = 1;
  }
}

// --------------------------------------------------------- SideInfoUcbAgent

SideInfoUcbAgent::SideInfoUcbAgent(int d, std::size_t horizon, RandomSource rng, const SideInfoOptions& options)
    : horizon_(horizon),
      rng_(std::move(rng)),
      options_(options),
      ball_(d, horizon, options.ball),
      ridge_(d, options.lambda),
      delta_(1.0 / static_cast<double>(std::max<std::size_t>(horizon, 2))) {
  candidates_ = build_net_sphere(d, options.eps, rng_, options.net).points();
}

RealVector SideInfoUcbAgent::act(std::size_t) {
  if (ridge_.count() == 0) return unit_vector(ridge_.dim(), 0);
  const double radius = linear_confidence_radius(options_.sigma_r, ridge_.dim(), ridge_.count(), ridge_.lambda(), delta_);
  const IntersectionResult res =
      confidence_intersection(ball_.ball(), ridge_.confidence(radius), candidates_, rng_, options_.intersection);
  if (res.empty) ++empty_;
  const RealVector values = Eigen::Map<const RealVector>(res.values.data(), static_cast<Eigen::Index>(res.values.size()));
  return candidates_[first_argmax(values)];
}

void SideInfoUcbAgent::observe(const RealVector& a, const RealVector& b_obs, double reward) {
  ball_.observe(a, b_obs, reward);
  // The imitation reward is th.a + 1 for a unit parameter.
  ridge_.add(a, reward - 1.0);
}

// ------------------------------------------------------------------ factory


namespace {

struct KindKeys {
  std::set<std::string> numeric;
  std::set<std::string> strings;
};

const std::map<std::string, KindKeys>& kind_keys() {
  static const std::map<std::string, KindKeys> table{
      {"oracle", {}},
      {"covering", {{"eps", "ucb_c", "net_failure_factor"}, {}}},
      {"lin_ucb", {{"eps", "lambda", "delta", "sigma_r", "reward_offset"}, {"candidates"}}},
      {"imitation", {{"c_alpha", "delta"}, {}}},
      {"expert_guided", {{"eps_lin", "eps_weak", "k_const", "lambda", "ucb_c", "sigma_r"}, {"mode"}}},
      {"poly_proxy", {{"rho"}, {}}},
      {"probe", {}},
      {"optimistic_sphere", {{"eps", "extra_particles"}, {}}},
      {"side_info_ucb", {{"eps", "c_alpha", "delta", "lambda", "sigma_r"}, {}}},
  };
  return table;
}

class ParamReader {
 public:
  explicit ParamReader(const AgentDescriptor& desc) : desc_(desc) { validate_agent_descriptor(desc); }

  double num(const std::string& key, double fallback) const {
    const auto it = desc_.params.find(key);
    return it == desc_.params.end() ? fallback : it->second;
  }
  std::optional<double> maybe(const std::string& key) const {
    const auto it = desc_.params.find(key);
    if (it == desc_.params.end()) return std::nullopt;
    return it->second;
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = desc_.options.find(key);
    return it == desc_.options.end() ? fallback : it->second;
  }
  std::size_t count(const std::string& key, std::size_t fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    if (v < 0.0 || v != std::floor(v)) {
      throw std::invalid_argument("agent '" + desc_.kind + "': parameter '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
  }

 private:
  const AgentDescriptor& desc_;
};

// Index mean + sigma_r sqrt(2 log n / n_i) for sigma_r-sub-Gaussian rewards.
double subgaussian_ucb_c(const NoiseSpec& noise) { return std::sqrt(2.0) * noise.sigma_r; }

double default_reward_offset(const GameSpec& spec) {
  switch (spec.variant) {
    case Variant::Imitation: return 1.0;
    case Variant::ExpertGuided: return 1.0 - spec.delta;
    default: return 0.0;
  }
}

}  // namespace

std::vector<std::string> agent_kinds() {
  return {"oracle", "covering", "lin_ucb", "imitation", "expert_guided", "poly_proxy", "probe", "optimistic_sphere",
          "side_info_ucb"};
}

void validate_agent_descriptor(const AgentDescriptor& desc) {
  const auto it = kind_keys().find(desc.kind);
  if (it == kind_keys().end()) throw std::invalid_argument("unknown agent kind '" + desc.kind + "'");
  for (const auto& [key, value] : desc.params) {
    if (!it->second.numeric.count(key)) {
      throw std::invalid_argument("agent '" + desc.kind + "': unknown parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw std::invalid_argument("agent '" + desc.kind + "': parameter '" + key + "' is not finite");
  }
  for (const auto& [key, value] : desc.options) {
    if (!it->second.strings.count(key)) throw std::invalid_argument("agent '" + desc.kind + "': unknown option '" + key + "'");
  }
}

std::unique_ptr<Agent> make_agent(const AgentDescriptor& desc, const AgentContext& ctx, RandomSource rng) {
  const GameSpec& spec = ctx.spec;
  spec.validate();
  const std::size_t T = ctx.horizon;
  if (T < 1) throw std::invalid_argument("make_agent: horizon must be positive");
  const std::string& kind = desc.kind;

  if (kind == "oracle") {
    ParamReader p(desc);
    if (ctx.theta == nullptr) throw std::invalid_argument("agent 'oracle': needs the parameter");
    return std::make_unique<FixedActionAgent>(optimal_action(spec, *ctx.theta), "oracle");
  }
  if (kind == "covering") {
    ParamReader p(desc);
    CoveringOptions o;
    o.eps = p.maybe("eps");
    o.ucb_c = p.num("ucb_c", subgaussian_ucb_c(ctx.noise));
    o.net.failure_factor = p.num("net_failure_factor", o.net.failure_factor);
    return std::make_unique<CoveringAgent>(spec, T, std::move(rng), o);
  }
  if (kind == "lin_ucb") {
    ParamReader p(desc);
    LinUcbOptions o;
    o.lambda = p.num("lambda", o.lambda);
    o.delta = p.num("delta", 0.0);
    o.sigma_r = p.num("sigma_r", ctx.noise.sigma_r);
    o.reward_offset = p.num("reward_offset", default_reward_offset(spec));
    const std::string mode = p.str("candidates", p.maybe("eps") ? "sphere_net" : "sphere_exact");
    const Eigen::Index m = spec.leader_dim();
    if (mode == "sphere_exact") return std::make_unique<LinUcbAgent>(LinUcbAgent::over_sphere(m, T, o));
    if (mode == "sphere_net") {
      const double eps = p.num("eps", 0.05);
      return std::make_unique<LinUcbAgent>(unit_sphere_net(m, eps, rng, NetOptions{}).points(), T, o);
    }
    throw std::invalid_argument("agent 'lin_ucb': candidates must be sphere_exact or sphere_net");
  }
  if (kind == "imitation") {
    require_variant(spec, Variant::Imitation, "imitation");
    ParamReader p(desc);
    ImitationOptions o;
    o.sigma_b = ctx.noise.sigma_b;
    o.c_alpha = p.num("c_alpha", o.c_alpha);
    o.delta = p.num("delta", o.delta);
    return std::make_unique<ImitationAgent>(spec.d, T, o);
  }
  if (kind == "expert_guided") {
    ParamReader p(desc);
    ExpertOptions o;
    o.mode = expert_mode_from_string(p.str("mode", "auto"));
    o.eps_lin = p.num("eps_lin", o.eps_lin);
    o.eps_weak = p.maybe("eps_weak");
    o.k_const = p.num("k_const", o.k_const);
    o.lambda = p.num("lambda", o.lambda);
    o.ucb_c = p.num("ucb_c", subgaussian_ucb_c(ctx.noise));
    o.sigma_r = p.num("sigma_r", ctx.noise.sigma_r);
    return std::make_unique<ExpertGuidedAgent>(spec, T, std::move(rng), o);
  }
  if (kind == "poly_proxy") {
    ParamReader p(desc);
    PolyProxyOptions o;
    o.rho = p.num("rho", o.rho);
    return std::make_unique<PolyProxyAgent>(spec, T, std::move(rng), o);
  }
  if (kind == "probe") {
    ParamReader p(desc);
    return std::make_unique<ProbeAgent>(spec);
  }
  if (kind == "optimistic_sphere") {
    ParamReader p(desc);
    OptimisticSphereOptions o;
    o.eps = p.num("eps", o.eps);
    o.extra_particles = p.count("extra_particles", o.extra_particles);
    return std::make_unique<OptimisticSphereAgent>(spec, T, std::move(rng), o);
  }
  if (kind == "side_info_ucb") {
    require_variant(spec, Variant::Imitation, "side_info_ucb");
    ParamReader p(desc);
    SideInfoOptions o;
    o.eps = p.num("eps", o.eps);
    o.ball.sigma_b = ctx.noise.sigma_b;
    o.ball.c_alpha = p.num("c_alpha", o.ball.c_alpha);
    o.ball.delta = p.num("delta", o.ball.delta);
    o.lambda = p.num("lambda", o.lambda);
    o.sigma_r = p.num("sigma_r", ctx.noise.sigma_r);
    return std::make_unique<SideInfoUcbAgent>(spec.d, T, std::move(rng), o);
  }
  throw std::invalid_argument("unknown agent kind '" + kind + "'");
}

}  // namespace stackbandit
