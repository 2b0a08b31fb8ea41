#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "stackbandit/agents.hpp"
#include "stackbandit/envs.hpp"

namespace stackbandit {

struct RunConfig {
  GameSpec spec;
  /// Explicit parameter; unset means a seeded random draw per episode.
  std::optional<Theta> theta;
  NoiseSpec noise;
  AgentDescriptor agent;
  std::size_t horizon = 1;
  std::vector<std::uint64_t> seeds;
  /// Strictly increasing round indices ending at horizon; empty means
  /// default_checkpoints(horizon).
  std::vector<std::size_t> checkpoints;
  /// Record per episode whether the imitation response ball contained the
  /// parameter in every round t in [2, T].
  bool track_coverage = false;

  /// Throws std::invalid_argument on an invalid configuration.
  void validate() const;
  std::vector<std::size_t> resolved_checkpoints() const;
};

/// {1} together with ceil(T 2^-j) for j = 0, 1, ..., sorted and deduplicated.
std::vector<std::size_t> default_checkpoints(std::size_t horizon);

struct RegretTrace {
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;
  /// Cumulative sum of hbar(a*) - hbar(a_t) up to each checkpoint.
  std::vector<double> cum_regret;
  std::vector<std::size_t> empty_intersections;
  /// Polynomial game only: cumulative b*(a*) - b*(a_t).
  std::vector<double> cum_proxy_regret;
  std::optional<bool> covered;
  double wall_seconds = 0.0;
};

/// Per-round view handed to episode observers after the agent has observed
/// the outcome.
struct RoundRecord {
  std::size_t t;
  const RealVector& action;
  const StepOutcome& outcome;
  double regret;
  const Agent& agent;
  const Theta& theta;
};

using RoundCallback = std::function<void(const RoundRecord&)>;

/// Parameter used by the episode with this seed.
Theta episode_theta(const RunConfig& config, std::uint64_t seed);

/// Deterministic in (config, seed). The parameter, the noise and the agent
/// draw from independent streams derived from the seed.
RegretTrace run_episode(const RunConfig& config, std::uint64_t seed, const RoundCallback& callback = {});

struct ExponentFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  std::size_t t_lo = 0;
  std::size_t t_hi = 0;
  std::size_t points = 0;
};

struct BatchSummary {
  std::vector<std::size_t> checkpoints;
  std::vector<double> mean;
  std::vector<double> stderr_mean;
  /// Empty unless every trace carries proxy regret.
  std::vector<double> proxy_mean;
  /// Set when every trace tracked coverage.
  std::optional<double> coverage;
  std::vector<RegretTrace> traces;
};

/// Mean and standard error (sample standard deviation over sqrt(n)) per
/// checkpoint. All traces must share the same checkpoints.
BatchSummary summarize(std::vector<RegretTrace> traces);

/// Runs all seeds, fanning out over `threads` workers (0 = hardware
/// concurrency). Traces are ordered as config.seeds and do not depend on the
/// schedule.
BatchSummary run_batch(const RunConfig& config, unsigned threads = 0);

/// OLS slope of log(mean regret) against log(t) over the checkpoints in
/// [t_lo, t_hi]. Throws std::invalid_argument with fewer than three points
/// and std::domain_error on nonpositive regret in the window.
ExponentFit scaling_exponent(const std::vector<std::size_t>& t, const std::vector<double>& regret, std::size_t t_lo,
                             std::size_t t_hi);
ExponentFit scaling_exponent(const BatchSummary& summary, std::size_t t_lo, std::size_t t_hi);

/// Fraction of seeds whose imitation ball covered the parameter in every
/// round. Requires the imitation game and agent.
double coverage_rate(const RunConfig& config, unsigned threads = 0);

}  // namespace stackbandit
