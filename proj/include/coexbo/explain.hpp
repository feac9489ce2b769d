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

#include "coexbo/gp.hpp"
#include "coexbo/preference.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace coexbo {

enum class ShapleyTarget { af, mean, std };

inline constexpr int kMaxShapleyDim = 16;

/// Coalition game over input features at a fixed query x. Values follow the
/// kernel-ridge conditional-mean estimator on the training inputs:
///   B_S = (K_S + lambda_S I)^{-1} k_S(X_S, x_S)
///   mean(S) = m + B_S^T (f~ - m),  std(S) = sqrt(max(B_S^T K~ B_S, 0))
/// with f~, K~ the posterior mean and covariance at the training inputs and m
/// the prior mean. The empty coalition takes the same estimator with every
/// kernel factor dropped, which gives uniform weights v / (n v + lambda_S).
class CoalitionGame {
 public:
  CoalitionGame(const GPModel& gp, const Vec& x, double lambda_s);

  int dim() const { return d_; }
  double lambda_s() const { return lambda_s_; }

  struct Value {
    double mean = 0.0;
    double std = 0.0;
  };
  // Coalition given as a bitmask; bit k set means feature k is in S.
  Value value(std::uint32_t mask) const;

 private:
  const GPModel* gp_;
  Vec u_;
  int d_;
  double lambda_s_;
  double prior_mean_;
  Vec f_tilde_;
  Mat k_tilde_;
};

double default_lambda_s(const GPModel& gp);

// nu(S) for the chosen target: mean term, std term, or mean + beta_sqrt * std.
double value_function(const GPModel& gp, const Vec& x, const std::vector<int>& subset,
                      double beta_sqrt, double lambda_s, ShapleyTarget target = ShapleyTarget::af);

struct ShapleyAttribution {
  Vec phi;
  double base = 0.0;  // nu(empty set)
  ShapleyTarget target = ShapleyTarget::af;
};

ShapleyAttribution shapley_values(const GPModel& gp, const Vec& x, double beta_sqrt,
                                  ShapleyTarget target, std::optional<double> lambda_s = std::nullopt);

struct ShapleyTriple {
  ShapleyAttribution af;
  ShapleyAttribution mean;
  ShapleyAttribution std;
};

// All three targets from a single enumeration of the coalitions.
ShapleyTriple shapley_triple(const GPModel& gp, const Vec& x, double beta_sqrt,
                             std::optional<double> lambda_s = std::nullopt);

// Zero-based indices of the two largest mean |phi| over both candidates,
// ordered by importance; ties go to the lower index.
std::pair<int, int> top2_dims(const ShapleyAttribution& a1, const ShapleyAttribution& a2);

struct Rect {
  Vec lo;
  Vec hi;
};

// Bounding box of the three points on `dims`, doubled about its centre, padded
// by 5% of the domain width along zero-width axes, clipped to the domain.
Rect view_rectangle(const Vec& x1, const Vec& x2, const Vec& x_best, const Domain& domain,
                    const std::vector<int>& dims);

struct SelectionFeedback {
  double prob_mean = 0.5;
  double prob_var = 0.0;
};

/// Monte Carlo mean and variance of Phi((f(x1) - f(x2)) / sqrt(noise)) under
/// the joint posterior of gp_after.
SelectionFeedback selection_accuracy(const GPModel& gp_after, const Vec& x1, const Vec& x2,
                                     int n_mc, std::uint64_t seed);

struct CandidateExplanation {
  Vec x;
  ShapleyTriple shapley;
};

inline constexpr int kHeatmapSize = 64;

struct ExplanationBundle {
  std::vector<CandidateExplanation> candidates;
  std::vector<int> top2;
  Rect rect;
  // Rows follow the second plotted dimension, columns the first; both axes
  // are inclusive linspaces over the rectangle.
  Mat gp_mean;
  Mat gp_std;
  Mat belief;
  std::optional<SelectionFeedback> feedback;
};

// `sc` may be null for sessions without a preference model; the belief
// heatmap is then left empty.
ExplanationBundle build_bundle(const GPModel& gp, const SoftCopeland* sc, const Vec& x1,
                               const Vec& x2, const Vec& x_best, double beta_sqrt);

}  // namespace coexbo
