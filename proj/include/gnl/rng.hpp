#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gnl::rng {

// SplitMix64 finalizer; bijective full-avalanche mix on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Key of the `index`-th child stream of `key`. Nesting derive() gives
/// independent substreams for (seed, sample), (seed, restart), ... so that
/// parallel consumers never share counters.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t index) noexcept {
  return mix64(key ^ (kGolden * (index + 1)));
}

/// Word `ctr` of the counter stream under `key` (SplitMix64 sequence,
/// evaluated by jump-ahead; no state is carried between calls).
constexpr std::uint64_t word(std::uint64_t key, std::uint64_t ctr) noexcept {
  return mix64(key + kGolden * (ctr + 1));
}

/// Uniform deviate in (0, 1], 53-bit resolution.
inline double uniform01(std::uint64_t key, std::uint64_t ctr) noexcept {
  return static_cast<double>((word(key, ctr) >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal deviate `ctr` of the stream under `key`.
/// Box-Muller on the word pair (2*ctr, 2*ctr+1); u1 is kept in (0,1] so the
/// log never sees zero.
inline double normal(std::uint64_t key, std::uint64_t ctr) noexcept {
  const double u1 = uniform01(key, 2 * ctr);
  const double u2 =
      static_cast<double>(word(key, 2 * ctr + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential normal stream over one key; uses both Box-Muller branches.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key) noexcept : key_(key) {}

  double next() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01(key_, ctr_++);
    const double u2 =
        static_cast<double>(word(key_, ctr_++) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gnl::rng
