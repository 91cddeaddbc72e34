#pragma once

#include <cstdint>
#include <random>

namespace mscale {

using Engine = std::mt19937_64;

// SplitMix64 finalizer. Child seeds are derived as mix(parent ^ mix(stream + 1)),
// a pure function of (parent, stream), so replica i always sees the same
// engine no matter which worker runs it or in which order.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return splitmix64(parent ^ splitmix64(stream + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_seed(derive_seed(parent, a), b);
}

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution whose algorithm is unspecified.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace mscale
