#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace darcnn {

// Counter-based generator: output i is splitmix64(key + i * golden). Streams are
// split by hashing an id into a fresh key, so per-scene streams do not depend on
// the order in which scenes are processed. Distributions are implemented here
// rather than taken from <random> so sequences are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed)) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Knuth's multiplication method; adequate for the small means used here.
  int poisson(double mean) {
    if (mean <= 0.0) {
      return 0;
    }
    const double limit = std::exp(-mean);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

  Rng split(std::uint64_t id) const { return Rng(key_ ^ mix(id + kGolden), 0); }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  Rng(std::uint64_t key, int) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Seed of the index-th item derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return Rng(base).split(index).next_u64();
}

}  // namespace darcnn
