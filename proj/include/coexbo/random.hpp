/*
 * Copyright 2026 The CoExBO Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "coexbo/common.hpp"

#include <cstdint>
#include <random>

namespace coexbo {

// Deterministic random source. Only the raw mt19937_64 stream is used; the
// uniform and normal transforms are implemented here so draws do not depend on
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  int uniform_int(int n);

  Vec uniform_in(const Domain& domain);
  Vec standard_normal(int n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with stream identifiers (splitmix64 finalizer), so that
// independent streams can be derived without sharing generator state.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Tag constants for derive_seed streams.
enum class Stream : std::uint64_t {
  init_design = 1,
  init_observe,
  init_duels,
  init_human,
  gp_fit,
  pref_fit,
  copeland,
  candidates,
  human,
  observe,
  feedback,
  baseline,
};

inline std::uint64_t derive_seed(std::uint64_t base, Stream s, std::uint64_t b = 0) {
  return derive_seed(base, static_cast<std::uint64_t>(s), b);
}

}  // namespace coexbo
