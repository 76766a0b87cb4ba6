#pragma once

// Pinned pseudo-random source.
//
// Every random decision in the library goes through Rng, which wraps
// std::mt19937_64. The engine's output sequence is fully specified by the
// C++ standard, so (seed, call sequence) -> values is bit-identical on every
// conforming platform. The standard distributions are NOT portable, so the
// floating-point and bounded-integer conversions below are done by hand.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spidertr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); rejection sampling, bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// One fair bit from the top bit of one draw.
  bool bit() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed derived from a parent seed and a path of integer tags.
/// Distinct paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t parent,
                          std::initializer_list<std::uint64_t> path);

}  // namespace spidertr
