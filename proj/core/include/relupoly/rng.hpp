#pragma once

#include <cstdint>
#include <random>

#include "relupoly/rational.hpp"

namespace relupoly {

// Seeded, splittable randomness. All random values used by constructions are
// rational with a fixed power-of-two denominator so everything stays exact.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), engine_(seed) {}

  // independent substream for a named task
  Rng split(std::uint64_t stream) const { return Rng(seed_mix(base_, stream)); }

  std::uint64_t next() { return engine_(); }

  long integer_in(long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    return d(engine_);
  }

  // uniform rational in [-scale, scale] on the 2^-16 grid
  Rat rational(const Rat& scale = Rat(1)) {
    return scale * rat_from_long(integer_in(-(1L << 16), 1L << 16), 1L << 16);
  }

  // uniform rational in (0, scale] on the grid
  Rat positive_rational(const Rat& scale = Rat(1)) {
    return scale * rat_from_long(integer_in(1, 1L << 16), 1L << 16);
  }

  RatVec rational_vector(std::size_t n, const Rat& scale = Rat(1)) {
    RatVec v(n);
    for (auto& q : v) q = rational(scale);
    return v;
  }

 private:
  static std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t base_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace relupoly
