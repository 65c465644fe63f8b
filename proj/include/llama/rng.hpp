#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "llama/types.hpp"

namespace llama {

// Deterministic RNG used everywhere randomness is needed. All sampling goes
// through hand-rolled transforms of mt19937_64 raw output so the same seed
// produces the same stream regardless of standard-library internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  uint64_t below(uint64_t n) { return n ? next() % n : 0; }

  // Uniform in [0,1) with 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

  // Box-Muller, no cached spare.
  double gaussian(double sigma) {
    double u1 = unit();
    double u2 = unit();
    if (u1 <= 0.0) u1 = 5e-324;
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  bool chance(double p) { return unit() < p; }

  u256 word() {
    u256 v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 64) | next();
    return v;
  }

  uint64_t fork_seed() { return next(); }

 private:
  std::mt19937_64 eng_;
};

// FNV-1a, used to derive per-prompt stub streams from (prompt, seed).
inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace llama
