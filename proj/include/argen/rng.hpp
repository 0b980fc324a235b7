#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace argen {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives a child seed from a root seed and a tag path. Streams derived
/// with different tag paths are decorrelated, so every work item (replicate,
/// trial, bootstrap pass) can own an engine that does not depend on
/// scheduling order.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = detail::splitmix64(seed);
  for (std::uint64_t t : tags) {
    h = detail::splitmix64(h ^ (t * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull));
  }
  return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> tags = {}) {
  return std::mt19937_64(derive_seed(seed, tags));
}

// Tag constants for the derivation paths used across modules. Values are
// arbitrary but frozen; changing them changes every seeded output.
namespace rng_tag {
inline constexpr std::uint64_t scenario = 1;
inline constexpr std::uint64_t dataset = 2;
inline constexpr std::uint64_t tuning = 3;
inline constexpr std::uint64_t trial = 4;
inline constexpr std::uint64_t bootstrap = 5;
inline constexpr std::uint64_t signal = 6;
inline constexpr std::uint64_t prices = 7;
inline constexpr std::uint64_t tracking = 8;
}  // namespace rng_tag

}  // namespace argen
