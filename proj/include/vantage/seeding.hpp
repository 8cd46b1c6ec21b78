#pragma once

#include <cstdint>

namespace vantage {

// Every randomized stage derives its RNG seed from (global seed, purpose,
// context ids) through this header. The purpose code occupies the top two
// bits of the derived seed, which partitions the seed space mechanically:
// a training-time draw can never collide with an evaluation-time draw.
enum class SeedPurpose : uint64_t {
  training = 0,
  evaluation = 1,
  scene = 2,
  aux = 3,
};

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

inline uint64_t derive_seed(uint64_t global_seed, SeedPurpose purpose,
                            uint64_t a = 0, uint64_t b = 0) {
  uint64_t h = detail::splitmix64(global_seed);
  h = detail::splitmix64(h ^ (static_cast<uint64_t>(purpose) + 0x517cc1b727220a95ull));
  h = detail::splitmix64(h ^ a);
  h = detail::splitmix64(h ^ b);
  // Stamp the purpose into the top bits; the remaining 62 bits carry entropy.
  h = (h >> 2) | (static_cast<uint64_t>(purpose) << 62);
  return h;
}

inline SeedPurpose seed_purpose_of(uint64_t derived_seed) {
  return static_cast<SeedPurpose>(derived_seed >> 62);
}

}  // namespace vantage
