#pragma once

#include <cstdint>

namespace uavsense {

/// Independent consumers of the single run seed.
enum class SeedStream : std::uint64_t {
  kAco = 1,
  kTargetSampler = 2,
  kInstanceGenerator = 3,
};

/// splitmix64 finaliser applied to `seed` mixed with the stream id and an
/// optional sub-stream counter. Stable across platforms and releases.
constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream,
                                    std::uint64_t substream = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(stream) + 1) +
                    0xBF58476D1CE4E5B9ull * substream;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace uavsense
