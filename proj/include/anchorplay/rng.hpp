// rng.hpp -- seeded random source with fully specified draw algorithms.
//
// std::mt19937_64 is pinned by the standard, and the distributions below are
// implemented here rather than via <random> adapters, so a given seed yields
// the same stream on every build. That property backs the byte-identical
// event-log guarantee.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace anchorplay {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  // Independent stream for a tagged sub-component (e.g. one agent).
  SeededRng derive(std::uint64_t tag, std::uint64_t index = 0) const {
    return SeededRng(splitmix64(splitmix64(seed_ ^ tag) ^ index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller; two draws per call, no cached spare.
  double normal() {
    double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  // Exponential with the given mean.
  double exponential(double mean) {
    double u = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    return -mean * std::log(u);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace anchorplay
