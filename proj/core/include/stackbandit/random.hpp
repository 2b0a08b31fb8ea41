#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stackbandit {

/// Seeded pseudo-random stream. Not thread-safe; every task owns its own.
///
/// Uniform and normal variates are produced from the raw 64-bit engine output
/// with fixed formulas, so streams are reproducible across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Independent child stream keyed by a label, e.g. `derive(seed, "noise")`.
  static RandomSource derive(std::uint64_t master_seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Counter-based seed derivation: splitmix64 over the master seed and a hash of
/// the label. Equal inputs always give equal outputs, independent of any
/// scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

}  // namespace stackbandit
