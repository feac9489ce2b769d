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

#include "coexbo/sobol.hpp"

#include "coexbo/random.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace coexbo {

namespace {

struct DirectionSpec {
  int degree;
  unsigned poly;  // interior coefficients of the primitive polynomial
  std::array<unsigned, 6> m;
};

// Joe & Kuo (new-joe-kuo-6.21201), dimensions 2..16.
constexpr std::array<DirectionSpec, kMaxSobolDim - 1> kDirections = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

constexpr int kBits = 32;

std::vector<std::uint32_t> direction_numbers(int dim_index) {
  std::vector<std::uint32_t> v(kBits + 1, 0);
  if (dim_index == 0) {
    for (int k = 1; k <= kBits; ++k) v[k] = 1u << (kBits - k);
    return v;
  }
  const DirectionSpec& spec = kDirections[dim_index - 1];
  const int s = spec.degree;
  for (int k = 1; k <= std::min(s, kBits); ++k) v[k] = spec.m[k - 1] << (kBits - k);
  for (int k = s + 1; k <= kBits; ++k) {
    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
    for (int i = 1; i <= s - 1; ++i) {
      if ((spec.poly >> (s - 1 - i)) & 1u) value ^= v[k - i];
    }
    v[k] = value;
  }
  return v;
}

}  // namespace

Mat sobol_points(int n, int dim, std::optional<std::uint64_t> shift_seed) {
  if (dim < 1 || dim > kMaxSobolDim) {
    throw UnsupportedError("sobol_points: dimension " + std::to_string(dim) +
                           " outside supported range [1, " + std::to_string(kMaxSobolDim) + "]");
  }
  if (n < 0) throw InputError("sobol_points: negative point count");
  Mat P(n, dim);
  std::vector<std::vector<std::uint32_t>> v(dim);
  for (int j = 0; j < dim; ++j) v[j] = direction_numbers(j);

  std::vector<std::uint32_t> x(dim, 0);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      // index of the rightmost zero bit of (i - 1), 1-based
      unsigned c = 1;
      unsigned value = static_cast<unsigned>(i - 1);
      while (value & 1u) {
        value >>= 1;
        ++c;
      }
      for (int j = 0; j < dim; ++j) x[j] ^= v[j][c];
    }
    for (int j = 0; j < dim; ++j) P(i, j) = static_cast<double>(x[j]) * 0x1.0p-32;
  }

  if (shift_seed) {
    Rng rng(*shift_seed);
    Vec shift(dim);
    for (int j = 0; j < dim; ++j) shift[j] = rng.uniform();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dim; ++j) {
        double u = P(i, j) + shift[j];
        P(i, j) = u >= 1.0 ? u - 1.0 : u;
      }
    }
  }
  return P;
}

}  // namespace coexbo
