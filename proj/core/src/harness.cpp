#include "stackbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace stackbandit {

std::vector<std::size_t> default_checkpoints(std::size_t horizon) {
  if (horizon < 1) throw std::invalid_argument("checkpoints: horizon must be positive");
  std::vector<std::size_t> out{1};
  for (std::size_t div = 1; div <= horizon; div *= 2) {
    out.push_back((horizon + div - 1) / div);
    if (div > horizon / 2) break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void RunConfig::validate() const {
  spec.validate();
  if (horizon < 1) throw std::invalid_argument("run config: horizon must be positive");
  if (seeds.empty()) throw std::invalid_argument("run config: at least one seed is required");
  if (theta) validate_theta(spec, *theta);
  if (!(noise.sigma_r >= 0.0) || !(noise.sigma_b >= 0.0) || !std::isfinite(noise.sigma_r) ||
      !std::isfinite(noise.sigma_b)) {
    throw std::invalid_argument("run config: noise levels must be finite and nonnegative");
  }
  validate_agent_descriptor(agent);
  if (!checkpoints.empty()) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      if (checkpoints[i] < 1) throw std::invalid_argument("run config: checkpoints must be >= 1");
      if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
        throw std::invalid_argument("run config: checkpoints must be strictly increasing");
      }
    }
    if (checkpoints.back() != horizon) throw std::invalid_argument("run config: last checkpoint must equal horizon");
  }
  if (track_coverage && (spec.variant != Variant::Imitation || agent.kind != "imitation")) {
    throw std::invalid_argument("run config: coverage tracking needs the imitation game and agent");
  }
}

std::vector<std::size_t> RunConfig::resolved_checkpoints() const {
  return checkpoints.empty() ? default_checkpoints(horizon) : checkpoints;
}

Theta episode_theta(const RunConfig& config, std::uint64_t seed) {
  if (config.theta) return *config.theta;
  RandomSource rng = RandomSource::derive(seed, "theta");
  return random_theta(config.spec, rng);
}

RegretTrace run_episode(const RunConfig& config, std::uint64_t seed, const RoundCallback& callback) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const GameSpec& spec = config.spec;
  const Theta theta = episode_theta(config, seed);
  RandomSource noise_rng = RandomSource::derive(seed, "noise");
  const AgentContext ctx{spec, config.noise, config.horizon, &theta};
  std::unique_ptr<Agent> agent = make_agent(config.agent, ctx, RandomSource::derive(seed, "agent"));

  RegretTrace trace;
  trace.seed = seed;
  trace.checkpoints = config.resolved_checkpoints();
  trace.cum_regret.reserve(trace.checkpoints.size());
  trace.empty_intersections.reserve(trace.checkpoints.size());

  const RealVector a_star = optimal_action(spec, theta);
  const double best = hbar(spec, theta, a_star);
  const bool proxy = spec.variant == Variant::Polynomial;
  const double best_b = proxy ? best_response(spec, theta, a_star)(0) : 0.0;
  const ImitationAgent* imitation = config.track_coverage ? dynamic_cast<const ImitationAgent*>(agent.get()) : nullptr;
  if (config.track_coverage && imitation == nullptr) {
    throw std::invalid_argument("run_episode: coverage tracking needs the imitation agent");
  }
  bool covered = true;

  double cum = 0.0;
  double cum_proxy = 0.0;
  std::size_t next = 0;
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const RealVector a = agent->act(t);
    if (!in_leader_domain(spec, a)) {
      throw std::runtime_error("run_episode: agent '" + agent->name() + "' left the action set at round " +
                               std::to_string(t));
    }
    const StepOutcome outcome = step(spec, theta, config.noise, a, noise_rng);
    const double regret = best - hbar(spec, theta, a);
    cum += regret;
    if (proxy) cum_proxy += best_b - outcome.b_true(0);
    agent->observe(a, outcome.b_obs, outcome.reward);
    if (imitation != nullptr && t < config.horizon && !imitation->ball().contains(theta.leader)) covered = false;
    if (callback) callback(RoundRecord{t, a, outcome, regret, *agent, theta});
    if (next < trace.checkpoints.size() && t == trace.checkpoints[next]) {
      trace.cum_regret.push_back(cum);
      trace.empty_intersections.push_back(agent->empty_intersection_count());
      if (proxy) trace.cum_proxy_regret.push_back(cum_proxy);
      ++next;
    }
  }
  if (config.track_coverage) trace.covered = covered;
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

BatchSummary summarize(std::vector<RegretTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("summarize: no traces");
  BatchSummary s;
  s.checkpoints = traces.front().checkpoints;
  const std::size_t m = s.checkpoints.size();
  const double n = static_cast<double>(traces.size());
  s.mean.assign(m, 0.0);
  s.stderr_mean.assign(m, 0.0);
  const bool proxy = std::all_of(traces.begin(), traces.end(), [&](const RegretTrace& tr) {
    return tr.cum_proxy_regret.size() == m;
  });
  if (proxy) s.proxy_mean.assign(m, 0.0);
  for (const auto& tr : traces) {
    if (tr.checkpoints != s.checkpoints || tr.cum_regret.size() != m) {
      throw std::invalid_argument("summarize: traces disagree on checkpoints");
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    double psum = 0.0;
    for (const auto& tr : traces) {
      sum += tr.cum_regret[j];
      if (proxy) psum += tr.cum_proxy_regret[j];
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& tr : traces) ss += (tr.cum_regret[j] - mean) * (tr.cum_regret[j] - mean);
    s.mean[j] = mean;
    s.stderr_mean[j] = traces.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    if (proxy) s.proxy_mean[j] = psum / n;
  }
  if (std::all_of(traces.begin(), traces.end(), [](const RegretTrace& tr) { return tr.covered.has_value(); })) {
    const auto hits = std::count_if(traces.begin(), traces.end(), [](const RegretTrace& tr) { return *tr.covered; });
    s.coverage = static_cast<double>(hits) / n;
  }
  s.traces = std::move(traces);
  return s;
}

BatchSummary run_batch(const RunConfig& config, unsigned threads) {
  config.validate();
  const std::size_t n = config.seeds.size();
  std::vector<RegretTrace> traces(n);
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        traces[i] = run_episode(config, config.seeds[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(std::move(traces));
}

ExponentFit scaling_exponent(const std::vector<std::size_t>& t, const std::vector<double>& regret, std::size_t t_lo,
                             std::size_t t_hi) {
  if (t.size() != regret.size()) throw std::invalid_argument("scaling_exponent: size mismatch");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(regret[i] > 0.0)) {
      throw std::domain_error("scaling_exponent: nonpositive regret at t=" + std::to_string(t[i]));
    }
    xs.push_back(std::log(static_cast<double>(t[i])));
    ys.push_back(std::log(regret[i]));
  }
  if (xs.size() < 3) throw std::invalid_argument("scaling_exponent: fewer than three checkpoints in window");
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - my - fit.slope * (xs[i] - mx);
    ssr += r * r;
  }
  fit.stderr_slope = xs.size() > 2 ? std::sqrt(ssr / (k - 2.0) / sxx) : 0.0;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = xs.size();
  return fit;
}

ExponentFit scaling_exponent(const BatchSummary& summary, std::size_t t_lo, std::size_t t_hi) {
  return scaling_exponent(summary.checkpoints, summary.mean, t_lo, t_hi);
}

double coverage_rate(const RunConfig& config, unsigned threads) {
  RunConfig tracked = config;
  tracked.track_coverage = true;
  return *run_batch(tracked, threads).coverage;
}

}  // namespace stackbandit
