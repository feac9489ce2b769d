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

#include <functional>

namespace coexbo {

// Objective returning f(x) and, when grad != nullptr, writing df/dx.
// Non-finite values are treated as infeasible points.
using ValueAndGradient = std::function<double(const Vec& x, Vec* grad)>;

struct BoxOptResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Maximizes a smooth function on the box [lower, upper] with a projected
/// limited-memory BFGS iteration and Armijo backtracking along the projected
/// path. Starting point is clipped into the box. Stops when the projected
/// gradient's max-norm drops below `gtol` or an accepted step changes the value
/// by less than `ftol` relative to max(|f|, 1).
BoxOptResult maximize_box_lbfgs(const ValueAndGradient& f, const Vec& x0, const Vec& lower,
                                const Vec& upper, int max_iters = 200, double gtol = 1e-6,
                                double ftol = 1e-12);

/// Derivative-free Nelder-Mead maximization. Vertices are clipped into the
/// box before evaluation; `initial_step` is the simplex edge per coordinate.
BoxOptResult nelder_mead_maximize(const std::function<double(const Vec&)>& f, const Vec& x0,
                                  const Vec& lower, const Vec& upper, const Vec& initial_step,
                                  int max_evals);

}  // namespace coexbo
