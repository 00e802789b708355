/*
 * Copyright 2026 The capot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CAPOT_RANDOM_HPP_
#define CAPOT_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace capot {

// 64-bit FNV-1a. Used for feature hashing, seed derivation and file
// checksums; the value is identical on every platform.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Labeled sub-seed: subsystems draw from independent streams so that adding
// draws in one cannot perturb another.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label_a,
                          std::string_view label_b);

// Portable random stream. The engine is fully specified by the standard; the
// distributions below are implemented here because the standard library's
// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Uniform over [0, 1) with 53 bits of precision.
  double uniform_real();

  // Uniform over [lo, hi).
  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

  // Index drawn from a discrete distribution given by nonnegative weights.
  std::size_t categorical(std::span<const double> weights);

  // k distinct indices from [0, n), uniformly without replacement, in the
  // order drawn.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace capot

#endif  // CAPOT_RANDOM_HPP_
