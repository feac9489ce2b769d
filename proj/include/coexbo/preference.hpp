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
#include <vector>

namespace coexbo {

struct DuelRecord {
  Vec x1;
  Vec x2;
  int y_pref = 0;  // 1 when x1 was preferred over x2
};

// Appends the mirrored record (x2, x1, 1 - y) for every input duel.
std::vector<DuelRecord> augment_duels(const std::vector<DuelRecord>& duels);

struct DirichletTargets {
  Mat targets;     // 2 x n; row c is the regression target of class channel c
  Mat noise_vars;  // 2 x n
};

// Row 1 is the "x1 wins" channel, row 0 the "x1 loses" channel.
DirichletTargets dirichlet_transform(const Eigen::VectorXi& labels, double alpha_eps);

struct PrefParams {
  double outputscale = 1.0;
  Vec lengthscales;  // d entries, shared by both halves of the joint input
  double constant_mean = 0.0;
};

struct PrefFitOptions {
  int restarts = 3;
  int max_iters = 100;
  std::optional<PrefParams> warm_start;
};

struct PrefBounds {
  static constexpr double min_outputscale = 1e-3;
  static constexpr double max_outputscale = 1e3;
  static constexpr double min_lengthscale = 1e-3;
  static constexpr double max_lengthscale = 10.0;
  static constexpr double min_mean = -10.0;
  static constexpr double max_mean = 5.0;
};

/// Dirichlet-transform GP classifier over joint inputs (x1, x2). Both class
/// channels share one RBF kernel whose lengthscales are tied across the two
/// halves and one constant mean; together with the mirrored training data
/// this makes the latent of channel 1 at (a, b) equal in law to channel 0 at
/// (b, a).
class PreferenceGP {
 public:
  PreferenceGP(Domain domain, std::vector<DuelRecord> duels, double alpha_eps, PrefParams params);

  const Domain& domain() const { return domain_; }
  const std::vector<DuelRecord>& duels() const { return duels_; }
  double alpha_eps() const { return alpha_eps_; }
  const PrefParams& params() const { return params_; }
  int dim() const { return domain_.dim(); }
  // Augmented joint inputs in unit coordinates, 2n x 2d.
  const Mat& joint_inputs() const { return U_; }
  const DirichletTargets& dirichlet() const { return dir_; }

  struct Latent {
    double mean[2];
    double var[2];
  };
  Latent latent(const Vec& x1, const Vec& x2) const;
  Latent latent_unit(const Vec& u_joint) const;

  // Latent mean and variance of each channel at every augmented training input.
  void latent_at_training(Mat& means, Mat& vars) const;

 private:
  Domain domain_;
  std::vector<DuelRecord> duels_;
  double alpha_eps_;
  PrefParams params_;
  Mat U_;
  DirichletTargets dir_;
  Mat chol_[2];
  Vec alpha_[2];
};

PreferenceGP fit_preference_gp(const std::vector<DuelRecord>& duels, const Domain& domain,
                               double alpha_eps, std::uint64_t seed,
                               const PrefFitOptions& options = {});

struct PreferenceProbability {
  double prob_mean = 0.5;
  double prob_var = 0.0;
};

/// Monte Carlo estimate of E[p] and E[p(1-p)] where p is the softmax of the two
/// channel latents. Draws come in antithetic pairs, so identical arms give
/// exactly 0.5 and swapped arms give exactly complementary means.
PreferenceProbability predict_preference(const PreferenceGP& g, const Vec& x1, const Vec& x2,
                                         int n_mc, std::uint64_t seed);

struct BQParams {
  double outputscale = 1.0;
  double lengthscale = 0.3;
  double noise = 1e-3;
};

/// Closed-form soft-Copeland belief. Two isotropic RBF surrogates over the
/// joint unit cube, one on E[p] and one on E[p(1-p)] at the duel nodes, are
/// integrated over the second argument analytically. Each surrogate has a
/// constant mean equal to the average of its targets; the constant integrates
/// over the unit box and the kernel part over the whole space.
class SoftCopeland {
 public:
  SoftCopeland(Domain domain, Mat nodes, Vec mean_targets, Vec var_targets, BQParams mean_params,
               BQParams var_params);

  const Domain& domain() const { return domain_; }
  const Mat& nodes() const { return nodes_; }
  const Vec& mean_targets() const { return mean_targets_; }
  const Vec& var_targets() const { return var_targets_; }
  const BQParams& mean_params() const { return mean_params_; }
  const BQParams& var_params() const { return var_params_; }
  const Vec& mean_weights() const { return omega_mean_; }
  const Vec& var_weights() const { return omega_var_; }
  double mean_offset() const { return offset_mean_; }
  double var_offset() const { return offset_var_; }
  double mean_scale() const { return vprime_mean_; }
  double var_scale() const { return vprime_var_; }
  double normalizer() const { return v_x_; }
  // Set when v' 1^T w was not positive and the normalizer fell back to sqrt(1e-8).
  bool normalizer_clamped() const { return clamped_; }

  double mean_at_unit(const Vec& u) const;
  double var_at_unit(const Vec& u) const;

 private:
  Domain domain_;
  Mat nodes_;
  Vec mean_targets_;
  Vec var_targets_;
  BQParams mean_params_;
  BQParams var_params_;
  Vec omega_mean_;
  Vec omega_var_;
  double offset_mean_ = 0.0;
  double offset_var_ = 0.0;
  double vprime_mean_ = 0.0;
  double vprime_var_ = 0.0;
  double v_x_ = 1.0;
  bool clamped_ = false;
};

struct BQFitOptions {
  int restarts = 3;
  int max_iters = 100;
  std::optional<BQParams> warm_mean;
  std::optional<BQParams> warm_var;
};

SoftCopeland build_soft_copeland(const PreferenceGP& g, int n_mc, std::uint64_t seed,
                                 const BQFitOptions& options = {});

double copeland_mean(const SoftCopeland& sc, const Vec& x);
double copeland_var(const SoftCopeland& sc, const Vec& x);

double mc_soft_copeland(const PreferenceGP& g, const Vec& x, int n_samples, int n_mc,
                        std::uint64_t seed);

struct BeliefSamples {
  Mat X;                          // count x d
  bool uniform_fallback = false;  // belief was non-positive on the whole grid
};

inline constexpr int kBeliefGridSize = 4096;

BeliefSamples sample_from_belief(const SoftCopeland& sc, int count, std::uint64_t seed);

}  // namespace coexbo
