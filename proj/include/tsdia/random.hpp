#pragma once

#include <cstdint>
#include <random>

namespace tsdia {

/// Caller-owned random state. Each Monte Carlo realization gets its own stream,
/// derived from (master_seed, index) so results do not depend on scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Stream for realization `index` of an ensemble seeded with `master_seed`.
  static RandomStream for_realization(std::uint64_t master_seed, std::uint64_t index);

  double normal() { return normal_(engine_); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to decorrelate neighbouring seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace tsdia
