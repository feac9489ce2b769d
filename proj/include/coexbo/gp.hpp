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

/// Hyperparameters of a constant-mean ARD-RBF Gaussian process. Values live in
/// the model's internal coordinates: unit-cube inputs and standardized outputs.
struct KernelParams {
  double outputscale = 1.0;
  Vec lengthscales;
  double noise = 1e-4;
  double constant_mean = 0.0;

  void validate(int dim) const;
};

/// outputscale * exp(-0.5 * sum_i ((x1_i - x2_i) / l_i)^2)
double rbf_kernel(const Vec& x1, const Vec& x2, const KernelParams& params);

// Cross-covariance between the rows of A and the rows of B.
Mat rbf_gram(const Mat& A, const Mat& B, double outputscale, const Vec& lengthscales);

struct CholeskyFactor {
  Mat lower;
  double jitter = 0.0;
};

// Cholesky of a symmetric matrix. When the plain factorization fails, adds
// 1e-8 * trace/n to the diagonal and escalates by x10 up to 1e-4 * trace/n.
CholeskyFactor robust_cholesky(const Mat& A, const char* context);

/// A GP surrogate conditioned on data. Inputs are mapped to the unit cube of
/// the domain and outputs are standardized with (y_mean, y_std); posterior
/// quantities are reported in raw units.
class GPModel {
 public:
  GPModel(Domain domain, Dataset data, KernelParams params, double y_mean, double y_std);

  // Model with no conditioning data: mean = constant_mean, variance = outputscale.
  static GPModel prior(Domain domain, KernelParams params);

  const Domain& domain() const { return domain_; }
  const Dataset& data() const { return data_; }
  const KernelParams& params() const { return params_; }
  const Mat& chol() const { return chol_; }
  const Vec& alpha() const { return alpha_; }
  const Mat& unit_inputs() const { return unit_X_; }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  double jitter() const { return jitter_; }
  int dim() const { return domain_.dim(); }
  int size() const { return data_.size(); }

  // Constant mean of the prior in raw output units.
  double prior_mean_raw() const { return y_mean_ + y_std_ * params_.constant_mean; }
  // Observation noise variance in raw output units.
  double noise_raw() const { return y_std_ * y_std_ * params_.noise; }

  double standardize(double y) const { return (y - y_mean_) / y_std_; }
  double destandardize(double z) const { return y_mean_ + y_std_ * z; }

 private:
  Domain domain_;
  Dataset data_;
  KernelParams params_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  Mat unit_X_;
  Mat chol_;
  Vec alpha_;
  double jitter_ = 0.0;
};

struct GPFitOptions {
  int restarts = 8;
  int max_iters = 200;
  // Used as the first restart's starting point when present.
  std::optional<KernelParams> warm_start;
};

// Hyperparameter bounds in internal coordinates.
struct GPBounds {
  static constexpr double min_lengthscale = 1e-3;
  static constexpr double max_lengthscale = 10.0;
  static constexpr double min_outputscale = 0.05;
  static constexpr double max_outputscale = 20.0;
  static constexpr double min_noise = 1e-6;
  static constexpr double max_noise = 1.0;
  static constexpr double max_abs_mean = 3.0;
};

/// Type-II maximum likelihood fit with multi-restart projected L-BFGS in
/// log-hyperparameter space. Requires at least two observations.
GPModel fit_gp(const Dataset& data, const Domain& domain, std::uint64_t seed,
               const GPFitOptions& options = {});

// Log marginal likelihood of standardized outputs `ys` at unit inputs `U`.
double log_marginal_likelihood(const Mat& U, const Vec& ys, const KernelParams& params);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

Prediction posterior(const GPModel& gp, const Vec& x);
// Posterior mean at each row of X (raw units).
Vec posterior_mean(const GPModel& gp, const Mat& X);
Mat posterior_cov(const GPModel& gp, const Mat& X1, const Mat& X2);

/// `count` joint posterior draws at the rows of X, one draw per row of the
/// result. Deterministic in `seed`.
Mat sample_posterior(const GPModel& gp, const Mat& X, int count, std::uint64_t seed);

// Same hyperparameters and standardization, one extra observation.
GPModel condition_on(const GPModel& gp, const Vec& x, double y);

// Sample mean and (n-1) standard deviation; std falls back to 1 when zero.
std::pair<double, double> standardization(const Vec& y);

}  // namespace coexbo
