#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vectorgas {

// Stream semantics: stream k of master seed s is an mt19937_64 engine seeded
// with splitmix64(s + k * 0x9E3779B97F4A7C15). SplitMix gives well-separated
// streams from consecutive ids and is the standard splitting construction.
inline uint64_t splitmix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Prng {
public:
  explicit Prng(uint64_t seed, uint64_t stream = 0)
      : engine_(splitmix64(seed + stream * 0x9E3779B97F4A7C15ull)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1} by rejection; exact for n <= 2^63.
  uint64_t below(uint64_t n) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Standard normal via the Marsaglia polar method (deterministic given the
  // engine output sequence, independent of the standard library).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace vectorgas
