#pragma once

#include <cstdint>
#include <random>

namespace tourney {

// b-th output of a splitmix64 stream started at `seed`. Used to derive
// independent per-block seeds; the block layout is fixed by the trial count,
// so results are identical for any worker-thread count.
inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t z = seed + (block + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic helpers over std::mt19937_64: the engine's output sequence is
// pinned by the standard, and the derivations below avoid distribution
// objects whose streams are implementation-defined.
class rng {
 public:
  explicit rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1), 53-bit resolution
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform in [0, bound), unbiased via power-of-two rejection
  std::uint32_t next_below(std::uint32_t bound) {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    for (;;) {
      std::uint64_t v = eng_() & mask;
      if (v < bound) return static_cast<std::uint32_t>(v);
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tourney
