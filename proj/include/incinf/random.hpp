#pragma once

#include <cstdint>
#include <random>

namespace incinf {

/// SplitMix64 finalizer. Used as a counter-based generator: every random
/// decision is a pure function of its key, so results do not depend on the
/// order in which work is scheduled.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t a, std::uint64_t b) noexcept { return mix64(mix64(a) ^ b); }

constexpr std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return mix64(hash_key(a, b) ^ c);
}

/// Maps 64 random bits to a double in [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) noexcept {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

/// Sequential generator for sampling and graph generation. The engine is
/// std::mt19937_64; reductions are spelled out so output is identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return to_unit(engine_()); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t floor = (0 - n) % n;
    std::uint64_t x = engine_();
    while (x < floor) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace incinf
