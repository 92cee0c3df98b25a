#pragma once

#include <cstdint>

namespace dirtrend {

// Reproducibility contract: the generator below is fixed per release.
// Streams are xoshiro256++ instances whose state is filled from a splitmix64
// sequence; independent substreams are derived from (seed, counter) so that
// replications can run concurrently yet schedule-invariantly.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives the seed of substream `counter` from a base seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (counter + 1));
  return splitmix64(s);
}

/// xoshiro256++ (Blackman & Vigna), seeded via splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static Rng substream(std::uint64_t seed, std::uint64_t counter) {
    return Rng(derive_stream(seed, counter));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace dirtrend
