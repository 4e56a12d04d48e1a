#pragma once

#include <cstdint>
#include <string_view>

namespace srsim {

/// Self-contained xoshiro256** stream with the handful of distributions the
/// simulator needs. Hand-rolled so that a given seed produces the same draw
/// sequence on every platform and standard library.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform integer in [lo, hi], inclusive, unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  double exponential(double mean);
  double normal();
  double gamma(double shape); // unit scale
  double beta(double a, double b);

 private:
  std::uint64_t s_[4];
};

/// Root seed plus named substream derivation. Each concern (backoff,
/// traffic, rate-selection, topology) gets its own stream, optionally
/// indexed per node, so swapping one subsystem never perturbs the draws of
/// another on the same seed.
class RngRoot {
 public:
  explicit RngRoot(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  RngStream stream(std::string_view concern, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
};

} // namespace srsim
