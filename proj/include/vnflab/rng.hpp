#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vnflab {

using Rng = std::mt19937_64;

// Derives an independent generator from a base seed and a stream label, so
// traffic randomness never shares a sequence with agent randomness.
inline Rng make_stream(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

}  // namespace vnflab
