#pragma once

#include <cstdint>
#include <initializer_list>

namespace nancy {

// SplitMix64 step (Steele, Lea, Flood 2014).  Every random draw in the
// simulator and the trainer goes through this generator so that runs are
// bit-reproducible across platforms; the standard <random> distributions
// are implementation-defined and would break that.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and stream tags.
inline std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = base;
  for (std::uint64_t t : tags) {
    s ^= splitmix64(t) + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  }
  std::uint64_t st = s;
  return splitmix64(st);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform double in [0, 1) with 53 bits of entropy.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next_u64() & 0xFF); }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Uniform integer in [0, n).  n must be nonzero.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace nancy
