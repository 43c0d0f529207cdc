#pragma once

#include <cstdint>

namespace vbsparse {

/// Counter-based pseudo-random generator built on the SplitMix64 finalizer
/// (Steele, Lea & Flood 2014; same mixer as in the xoshiro seeding routine).
/// Output i of a stream is mix64(key + (i+1) * 0x9E3779B97F4A7C15), so any
/// draw can be replayed from its counter and distinct (seed, stream) pairs
/// give statistically independent streams. Used everywhere randomness is
/// needed so that replications are reproducible and parallelizable.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  /// Stream derivation: key = mix64(mix64(seed) ^ mix64(stream ^ kStreamSalt)).
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double next_uniform();

  /// Standard normal via the inverse-CDF method (Wichura's PPND16).
  double next_normal();

  static std::uint64_t mix64(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal quantile function, Wichura's algorithm AS 241 (PPND16),
/// accurate to about 1e-15 relative over (0, 1). Throws DomainError outside.
double normal_quantile(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

}  // namespace vbsparse
