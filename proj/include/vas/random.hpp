#pragma once

// Seeded random streams. std::mt19937_64 output is fixed by the standard;
// the distribution transforms below are spelled out so results do not
// depend on the standard library's <random> distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>

#include "vas/sphere.hpp"

namespace vas {

/// Default seed used by the CLI and the experiment configs.
inline constexpr std::uint64_t kDefaultSeed = 20170620;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Independent stream for sub-task `index` of a seeded job.
  static Rng derive(std::uint64_t seed, std::uint64_t index) { return Rng(mix(seed ^ mix(index + 0x632be59bd9b4e019ULL))); }

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    // Box-Muller, discarding the second variate
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
  double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vas
