#pragma once

#include <cstdint>

namespace relpair {

/// Deterministic 64-bit generator (SplitMix64). Self-contained so that a
/// given seed produces the same stream on every platform and standard
/// library, which is what makes whole-run outputs byte-reproducible.
///
/// `derive` builds statistically independent substreams from a base seed and
/// a stream index; the simulation gives each trial its own substream so the
/// sample drawn for trial i never depends on how many draws trial i-1 made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed) ^ mix(stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1), 53 random bits, never returns 1.0.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// True with probability p; exact at p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace relpair
