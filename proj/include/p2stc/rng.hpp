#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace p2stc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream derivation: the engine depends only on the key tuple,
/// never on how many streams were created before it.
inline Rng derive_stream(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

/// Stream purposes within one simulated frame.
enum class StreamPurpose : std::uint64_t { info_bits = 1, fading = 2, noise = 3 };

}  // namespace p2stc
