#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace livrank {

// Counter-based randomness: every draw is a pure function of its key, so
// results never depend on thread scheduling or call interleaving.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

template <typename... Parts>
constexpr std::uint64_t derive_key(std::uint64_t base, Parts... parts) noexcept {
  std::uint64_t k = splitmix64(base);
  ((k = splitmix64(k ^ static_cast<std::uint64_t>(parts))), ...);
  return k;
}

/// Uniform in [0, 1) from the top 53 bits of a key.
inline double unit_uniform(std::uint64_t key) noexcept {
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two derived uniforms.
inline double unit_normal(std::uint64_t key) noexcept {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double u1 = 1.0 - unit_uniform(splitmix64(key ^ 0x1ULL));  // (0, 1]
  const double u2 = unit_uniform(splitmix64(key ^ 0x2ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace livrank
