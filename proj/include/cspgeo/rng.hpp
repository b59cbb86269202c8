#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace cspgeo {

/// Strongly typed 64-bit seed. Every randomized operation takes one.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

/// Version tag of the random stream. Bump whenever output for a given seed changes.
inline constexpr const char* kRngVersion = "splitmix64-ctr/1";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed for stream `stream` of `parent`.
constexpr Seed derive_seed(Seed parent, std::uint64_t stream) noexcept {
  return Seed{mix64(mix64(parent.value ^ 0x6A09E667F3BCC909ULL) + mix64(stream + 0xBB67AE8584CAA73BULL))};
}

/// Counter-based generator: the i-th output is mix64(key + (i+1)*golden).
///
/// The whole stream is a pure function of the key, so a trial can be replayed from
/// its derived seed alone, and `split` gives reproducible sub-streams for parallel
/// trials. Distributions are implemented here rather than with <random> because the
/// standard distributions are not bit-identical across library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(Seed seed) noexcept : key_(seed.value) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix64(key_ + counter_);
  }

  /// Child generator for stream `stream`; does not advance this generator.
  [[nodiscard]] Rng split(std::uint64_t stream) const noexcept { return Rng(derive_seed(Seed{key_}, stream)); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cspgeo
