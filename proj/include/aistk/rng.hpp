#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aistk {

// 64-bit FNV-1a over a label string.
constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace detail {
// splitmix64 finalizer; decorrelates derived seeds from the base seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives a component seed from one global seed by fixed labeled hashing.
// Every pipeline stream (detector candidates, mutation, synthesis, ...) gets
// its own label so streams never alias.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  return detail::mix64(base + 0x9e3779b97f4a7c15ull + fnv1a64(label));
}

// Indexed variant for per-clone / per-generation stream splitting.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                    std::uint64_t index) {
  return detail::mix64(derive_seed(base, label) + 0x9e3779b97f4a7c15ull * (index + 1));
}

// Seeded generator with the handful of draws the library needs.
// Deterministic for a given seed within one build of the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  std::uint32_t uniform_u32() {
    return static_cast<std::uint32_t>(engine_() >> 32);
  }

  // [0, 1)
  double uniform_real() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aistk
