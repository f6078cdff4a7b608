#pragma once

#include <cstdint>
#include <random>

namespace crowdcharge {

using Rng = std::mt19937_64;

// Independent sub-streams of one run. Keeping them apart means every
// strategy sees the same initial crowd, social graph and movement for a
// given seed.
enum class StreamPurpose : std::uint32_t { Init = 1, Graph = 2, Movement = 3 };

inline Rng make_stream(std::uint64_t seed, StreamPurpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), 0x6d6f7361u};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace crowdcharge
