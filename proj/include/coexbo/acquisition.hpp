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
#include <functional>
#include <string>

namespace coexbo {

// How the soft-Copeland belief is mapped onto the objective's scale.
//   direct: mu = E[y] * c + sqrt(V[y]), slope E[y]
//   swapped: mu = sqrt(V[y]) * c + E[y], slope sqrt(V[y])
enum class RhoConvention { direct, swapped };

std::string to_string(RhoConvention r);
RhoConvention rho_convention_from_string(const std::string& s);

struct AcqConfig {
  double beta_sqrt = 2.0;
  double gamma = 0.01;
  int t = 1;
  RhoConvention rho = RhoConvention::direct;

  void validate() const;
};

// Mean and standard deviation of the raw (unstandardized) observations.
struct RawYStats {
  double mean = 0.0;
  double std = 1.0;
};

RawYStats raw_y_stats(const Vec& y);

struct ScaledBelief {
  double mu_pi = 0.0;
  double var_pi = 0.0;
  bool std_fallback = false;  // s_y was zero and replaced by 1
};

ScaledBelief scale_belief(double cop_mean, double cop_var, const RawYStats& stats,
                          double sigma_f_sq, const AcqConfig& cfg);

double ucb(const GPModel& gp, const Vec& x, double beta_sqrt);

struct GaussianMoments {
  double mean = 0.0;
  double var = 0.0;
};

// Moments of the normalized product N(mu_pi, var_pi) * N(mu_f, var_f).
GaussianMoments product_of_gaussians(double mu_pi, double var_pi, double mu_f, double var_f);

double coexbo_af(const GPModel& gp, const SoftCopeland& sc, const Vec& x, const AcqConfig& cfg,
                 const RawYStats& stats);

double pibo_af(const GPModel& gp, const SoftCopeland& sc, const Vec& x, double gamma_pibo, int t,
               double beta_sqrt);

using ScalarField = std::function<double(const Vec&)>;

struct AfMaxOptions {
  int n_seeds = 512;
  int restarts = 10;
  int polish_evals = 200;
};

/// Scores a shifted Sobol design, polishes the best `restarts` seeds with
/// bound-clipped Nelder-Mead and returns the best point seen. Exact ties go
/// to the lower seed index.
Vec maximize_af(const ScalarField& af, const Domain& domain, std::uint64_t seed,
                const AfMaxOptions& options = {});

struct CandidatePair {
  Vec x1;  // UCB maximizer
  Vec x2;  // belief-augmented maximizer
};

CandidatePair generate_pair(const GPModel& gp, const SoftCopeland& sc, const AcqConfig& cfg,
                            const RawYStats& stats, std::uint64_t seed,
                            const AfMaxOptions& options = {});

inline constexpr int kThompsonGrid = 1024;

Vec thompson_candidate(const GPModel& gp, std::uint64_t seed, int grid_size = kThompsonGrid);

struct RegretDiagnostics {
  double r_ratio_bound = 1.0;
  double delta_mu = 0.0;
};

// sqrt(b / (b + var_x1)) with b = scaled belief variance + decay term.
double regret_ratio(double scaled_belief_var, double decay_term, double var_x1);

RegretDiagnostics regret_ratio_bound(const GPModel& gp_prev, const SoftCopeland& sc_prev,
                                     const Vec& x1, const Vec& x2, const AcqConfig& cfg,
                                     const RawYStats& stats);

// Finite-domain confidence schedule beta_t = 2 log(|D| pi^2 t^2 / (6 delta)).
double finite_domain_beta(int domain_size, int t, double delta);

}  // namespace coexbo
