#pragma once

#include <cstdint>
#include <string_view>

namespace amr {

// splitmix64 finalizer; the building block for every random stream here.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derive an independent seed for a named subsystem from the root seed.
constexpr std::uint64_t split_seed(std::uint64_t root,
                                   std::string_view label) noexcept {
  return mix64(root ^ fnv1a(label));
}

constexpr std::uint64_t split_seed(std::uint64_t root,
                                   std::uint64_t counter) noexcept {
  return mix64(root ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

// Sequential splitmix64 stream. Output is identical on every platform, which
// std::uniform_real_distribution does not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // [0, n)
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire-style multiply-shift; bias is negligible for the sizes used here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Standard normal via Box-Muller.
  double normal() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace amr
