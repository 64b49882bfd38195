#pragma once

#include <cmath>
#include <cstdint>

namespace usim {

// splitmix64: tiny counter based generator with full 64 bit state avalanche.
// Used everywhere so that streams can be derived from ids instead of shared.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1), 53 bit mantissa
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
};

// Deterministic substream ids: feeding the parts through one splitmix step
// each gives independent looking seeds for (sample, stage, angle) tuples.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a);
  std::uint64_t h = g.next_u64() ^ (b + 0x9e3779b97f4a7c15ULL);
  SplitMix64 g2(h);
  return g2.next_u64();
}

inline std::uint64_t substream(std::uint64_t master, std::uint64_t i) {
  return mix_seed(master, i);
}

inline std::uint64_t substream(std::uint64_t master, std::uint64_t i, std::uint64_t j) {
  return mix_seed(mix_seed(master, i), j);
}

// Marsaglia polar method. std::normal_distribution is implementation defined
// across standard libraries, which would break byte level reproducibility.
struct GaussGen {
  SplitMix64 rng;
  bool have_spare = false;
  double spare = 0.0;

  explicit GaussGen(std::uint64_t seed) : rng(seed) {}

  double next() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u, v, s;
    do {
      u = 2.0 * rng.next_double() - 1.0;
      v = 2.0 * rng.next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare = v * m;
    have_spare = true;
    return u * m;
  }
};

}  // namespace usim
