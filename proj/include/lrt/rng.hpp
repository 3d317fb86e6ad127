#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

// Counter-based random streams.
//
// A master seed is split into named substreams, and every Monte Carlo
// replicate gets its own Sequence derived from (substream key, replicate
// index). Replicates can therefore be processed by any number of workers in
// any order and still produce identical draws. std::hash is deliberately
// avoided: keys must be stable across builds.

namespace lrt::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// FNV-1a over the label bytes.
inline constexpr std::uint64_t hash_label(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Sequential generator owned by a single replicate.
class Sequence {
 public:
  explicit Sequence(std::uint64_t state) noexcept : state_(state) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform on the open interval (0,1). Values are odd multiples of 2^-53,
  // so the reflection x -> 1-x is exact and exactly involutive in binary64.
  double uniform() noexcept {
    const std::uint64_t c = next_u64() >> 12;  // top 52 bits
    return static_cast<double>(2 * c + 1) * 0x1p-53;
  }

  // Box-Muller; consumes two uniforms per variate.
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential() noexcept { return -std::log(uniform()); }

  double cauchy() noexcept {
    return std::tan(std::numbers::pi * (uniform() - 0.5));
  }

  double logistic() noexcept {
    const double u = uniform();
    return std::log(u / (1.0 - u));
  }

  double half_normal() noexcept { return std::abs(normal()); }

 private:
  std::uint64_t state_;
};

// Named substream of a master seed; hands out per-replicate Sequences.
class Stream {
 public:
  explicit Stream(std::uint64_t master) noexcept : key_(mix64(master)) {}

  Stream(std::uint64_t master, std::string_view label,
         std::uint64_t index = 0) noexcept
      : key_(mix64(mix64(master ^ hash_label(label)) + index * kGamma)) {}

  Stream substream(std::string_view label, std::uint64_t index = 0) const noexcept {
    return Stream(FromKey{}, mix64(mix64(key_ ^ hash_label(label)) + index * kGamma));
  }

  std::uint64_t key() const noexcept { return key_; }

  Sequence at(std::uint64_t replicate) const noexcept {
    return Sequence(mix64(key_ + (replicate + 1) * kGamma));
  }

 private:
  struct FromKey {};
  Stream(FromKey, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_;
};

}  // namespace lrt::rng
