#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>

namespace fdcate {

/// SplitMix64 finalizer; used to derive independent seeds and counter-based draws.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a list of tags into a seed. Order matters.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

inline std::uint64_t hash_doubles(std::uint64_t h, std::span<const double> values) {
  for (double v : values) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

/// Uniform in the open interval (0,1) from 64 random bits.
inline double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw that is a pure function of `key` (Box-Muller on two derived uniforms).
inline double keyed_standard_normal(std::uint64_t key) {
  const double u1 = bits_to_open_unit(splitmix64(key));
  const double u2 = bits_to_open_unit(splitmix64(key ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fdcate
