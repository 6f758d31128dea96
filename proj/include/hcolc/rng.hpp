#pragma once

#include <cstdint>

#include "hcolc/rational.hpp"

namespace hcolc {

// splitmix64: tiny, stable across platforms, fully determined by the seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound)
  uint64_t below(uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

  // uniform in [lo, hi] inclusive
  int64_t range_i64(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
  }

  bool chance(uint32_t num, uint32_t den) { return below(den) < num; }

  // random rational with small numerator/denominator, good for exact oracles
  Rational rational(int64_t mag = 1000, int64_t den_max = 16) {
    int64_t n = range_i64(-mag, mag);
    int64_t d = range_i64(1, den_max);
    return Rational(BigInt(n), BigInt(d));
  }

  // uniform double in [lo, hi]
  double real(double lo, double hi) {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  uint64_t state_;
};

}  // namespace hcolc
