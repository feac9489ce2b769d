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
#include <optional>

namespace coexbo {

inline constexpr int kMaxSobolDim = 16;

/// First `n` points of the Sobol sequence in [0,1)^dim (Joe-Kuo direction
/// numbers, Gray-code ordering, origin included). When `shift_seed` is given
/// the whole point set is rotated by a uniform random shift modulo 1
/// (Cranley-Patterson), which keeps the low-discrepancy structure while giving
/// each seed a distinct design.
Mat sobol_points(int n, int dim, std::optional<std::uint64_t> shift_seed = std::nullopt);

}  // namespace coexbo
