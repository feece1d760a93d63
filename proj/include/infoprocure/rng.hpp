// Copyright 2026 The infoprocure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace infoprocure {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a, used to turn path labels into 64-bit words.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so a stream's draws never depend on how work was scheduled.
/// Satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterEngine(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGoldenGamma);
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stateful sampler over one stream. Not thread-safe; each worker derives its
/// own stream.
class Generator {
 public:
  explicit constexpr Generator(std::uint64_t key) noexcept : engine_(key) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  CounterEngine& engine() noexcept { return engine_; }

 private:
  CounterEngine engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// A position in the tree of random streams. The root is a 64-bit seed; each
/// `derive` step appends one label (experiment name, replication index, agent
/// index, purpose) to the path. Derivation is pure, so identical
/// (seed, path) pairs give bit-identical draws on any thread.
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t seed) noexcept
      : seed_(seed), key_(mix64(seed ^ 0x6A09E667F3BCC909ull)) {}

  constexpr RngStream derive(std::string_view label) const noexcept {
    return RngStream(seed_, step(key_, hash_label(label), 0x5Bull), depth_ + 1);
  }

  constexpr RngStream derive(std::uint64_t index) const noexcept {
    return RngStream(seed_, step(key_, index, 0xA7ull), depth_ + 1);
  }

  Generator generator() const noexcept { return Generator(key_); }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::size_t depth() const noexcept { return depth_; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  constexpr RngStream(std::uint64_t seed, std::uint64_t key,
                      std::size_t depth) noexcept
      : seed_(seed), key_(key), depth_(depth) {}

  static constexpr std::uint64_t step(std::uint64_t key, std::uint64_t word,
                                      std::uint64_t tag) noexcept {
    return mix64((key + kGoldenGamma * tag) ^ mix64(word + kGoldenGamma));
  }

  std::uint64_t seed_;
  std::uint64_t key_;
  std::size_t depth_ = 0;
};

}  // namespace infoprocure
