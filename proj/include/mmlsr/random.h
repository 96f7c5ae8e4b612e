// Copyright 2026-present the mmlsr project
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

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace mmlsr {

/// SplitMix64 finalizer; used to derive independent generator seeds.
std::uint64_t SplitMix64(std::uint64_t x);

/// Seed for the stream keyed by (seed, key):
/// SplitMix64(SplitMix64(seed) + key), with wrap-around addition.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t key);

/// Thin wrapper over std::mt19937_64. Only the raw engine output is used
/// (never the std:: distributions, whose algorithms vary across standard
/// libraries), so every stream is reproducible on any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits: (next() >> 11) * 2^-53.
  double uniform01();
  /// Uniform in [lo, hi): lo + (hi - lo) * uniform01().
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n) by rejection sampling. n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates from the back using below().
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mmlsr
