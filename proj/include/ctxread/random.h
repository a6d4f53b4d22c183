/*
 * Copyright 2026 The ctxread Authors.
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

#ifndef CTXREAD_RANDOM_H_
#define CTXREAD_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace ctxread {

// Seeded generator whose outputs are identical across standard libraries.
// std::mt19937_64 is fully specified; the distribution helpers below are
// written out so that no implementation-defined distribution is involved.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from (seed, name).
  static Rng Substream(std::uint64_t seed, std::string_view name);

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);

  // Standard normal via Box-Muller.
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer, used to derive substream seeds.
std::uint64_t MixSeed(std::uint64_t x);

}  // namespace ctxread

#endif  // CTXREAD_RANDOM_H_
