#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mptsim {

/// SplitMix64 finalizer. Used to seed generators and to derive substreams.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** with portable, platform-independent sampling helpers.
///
/// Substreams: `Rng(seed, stream)` seeds the 256-bit state from a SplitMix64
/// sequence whose starting point is mix64(seed) ^ mix64(stream ^ kStreamSalt).
/// Every consumer (a construction phase, the arrival process, endpoint draws)
/// owns its own stream id, so adding a consumer never shifts the draws seen
/// by another one. None of the helpers below use <random> distributions,
/// whose output is implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Unbiased uniform integer on the closed range [lo, hi] (Lemire).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;
  bool bernoulli(double p) noexcept;
  /// Poisson(lambda). Multiplication method below 10, PTRS (Hormann) above.
  std::uint64_t poisson(double lambda) noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Stream ids for the simulation-level consumers of a run seed.
namespace streams {
inline constexpr std::uint64_t kArrivals = 0x100;
inline constexpr std::uint64_t kEndpoints = 0x101;
/// Topology construction uses kTopologyBase + 16 * level + phase.
inline constexpr std::uint64_t kTopologyBase = 0x1000;
}  // namespace streams

}  // namespace mptsim
