#pragma once

// Counter-based splittable random numbers.
//
// Every stochastic routine in this library derives its randomness from a
// 64-bit user seed through a stateless mixing function applied to a key
// tuple (seed, stream, and caller-chosen coordinates such as state, action,
// trajectory index, step index).  Draws therefore depend only on the key,
// never on call order, which makes trajectories reproducible bit for bit
// and lets independent subsystems share one seed without coupling.

#include <cstdint>
#include <initializer_list>

namespace multichain {

/// One round of the splitmix64 output function (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a tuple of 64-bit words into a single well-scrambled word.
/// Feeding each word through a fresh splitmix round keeps distinct tuples
/// at full 64-bit avalanche distance from one another.
inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x8f0e3e1d2c4b5a69ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of a mixed word.
inline double u01_from_bits(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Counter-mode generator: the i-th output is a pure function of
/// (key, i).  Copying a KeyedRng replays its stream.
struct KeyedRng {
  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  explicit KeyedRng(std::uint64_t k) : key(k) {}
  KeyedRng(std::initializer_list<std::uint64_t> words) : key(mix_key(words)) {}

  std::uint64_t next_u64() { return splitmix64(key ^ splitmix64(counter++)); }
  double next_u01() { return u01_from_bits(next_u64()); }

  /// Uniform integer in [0, n).
  int next_below(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_u01(); }
};

/// Index of the CDF cell containing u.  Weights need not sum to one
/// exactly; residual mass from rounding goes to the last cell.
inline int sample_categorical(const double* w, int n, double u) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace multichain
