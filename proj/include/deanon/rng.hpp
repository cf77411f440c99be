#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace deanon {

__extension__ using uint128_t = unsigned __int128;

/// Name written into every output manifest so fixtures can be regenerated.
inline constexpr const char* kRngAlgorithm = "mt19937_64 seeded by splitmix64 stream path (v1)";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable random stream. All derived quantities (uniform reals, bounded
/// integers) are computed here rather than through <random> distributions so
/// that draws are identical across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent substream addressed by a counter path, e.g. {replicate, trial}.
  /// The stream for a path never depends on how many other paths were used.
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x9e3779b97f4a7c15ULL));
    return Rng(h);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., bound - 1}; bound must be positive (Lemire's method).
  std::uint64_t below(std::uint64_t bound) {
    uint128_t product = static_cast<uint128_t>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<uint128_t>(engine_()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace deanon
