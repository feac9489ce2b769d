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

#include "coexbo/acquisition.hpp"

#include "coexbo/optimize.hpp"
#include "coexbo/random.hpp"
#include "coexbo/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace coexbo {

std::string to_string(RhoConvention r) {
  return r == RhoConvention::direct ? "direct" : "swapped";
}

RhoConvention rho_convention_from_string(const std::string& s) {
  if (s == "direct") return RhoConvention::direct;
  if (s == "swapped") return RhoConvention::swapped;
  throw InputError("unknown rho_convention '" + s + "' (expected direct or swapped)");
}

void AcqConfig::validate() const {
  if (!(beta_sqrt >= 0.0) || !std::isfinite(beta_sqrt)) throw InputError("beta_sqrt must be >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be > 0");
  if (t < 1) throw InputError("t must be >= 1");
}

RawYStats raw_y_stats(const Vec& y) {
  RawYStats s;
  if (y.size() == 0) return s;
  s.mean = y.mean();
  s.std = y.size() > 1
              ? std::sqrt((y.array() - s.mean).square().sum() / static_cast<double>(y.size() - 1))
              : 0.0;
  return s;
}

ScaledBelief scale_belief(double cop_mean, double cop_var, const RawYStats& stats,
                          double sigma_f_sq, const AcqConfig& cfg) {
  ScaledBelief out;
  double s_y = stats.std;
  if (!(s_y > 0.0)) {
    s_y = 1.0;
    out.std_fallback = true;
  }
  const double decay = cfg.gamma * static_cast<double>(cfg.t) * static_cast<double>(cfg.t) *
                       std::max(sigma_f_sq, 0.0);
  const double v = std::max(cop_var, 0.0);
  if (cfg.rho == RhoConvention::direct) {
    out.mu_pi = stats.mean * cop_mean + s_y;
    out.var_pi = stats.mean * stats.mean * v + decay;
  } else {
    out.mu_pi = s_y * cop_mean + stats.mean;
    out.var_pi = s_y * s_y * v + decay;
  }
  return out;
}

double ucb(const GPModel& gp, const Vec& x, double beta_sqrt) {
  const Prediction p = posterior(gp, x);
  return p.mean + beta_sqrt * std::sqrt(p.variance);
}

GaussianMoments product_of_gaussians(double mu_pi, double var_pi, double mu_f, double var_f) {
  GaussianMoments out;
  const double denom = var_pi + var_f;
  if (!(denom > 0.0)) {
    out.mean = mu_f;
    out.var = 0.0;
    return out;
  }
  out.mean = (var_f * mu_pi + var_pi * mu_f) / denom;
  out.var = var_pi * var_f / denom;
  return out;
}

double coexbo_af(const GPModel& gp, const SoftCopeland& sc, const Vec& x, const AcqConfig& cfg,
                 const RawYStats& stats) {
  const Prediction f = posterior(gp, x);
  const Vec u = sc.domain().to_unit(x);
  const ScaledBelief b = scale_belief(sc.mean_at_unit(u), sc.var_at_unit(u), stats, f.variance, cfg);
  const GaussianMoments m = product_of_gaussians(b.mu_pi, b.var_pi, f.mean, f.variance);
  return m.mean + cfg.beta_sqrt * std::sqrt(m.var);
}

double pibo_af(const GPModel& gp, const SoftCopeland& sc, const Vec& x, double gamma_pibo, int t,
               double beta_sqrt) {
  if (t < 1) throw InputError("pibo_af: t must be >= 1");
  constexpr double kFloor = 1e-12;
  const double c = std::max(copeland_mean(sc, x), kFloor);
  return ucb(gp, x, beta_sqrt) * std::pow(c, gamma_pibo / static_cast<double>(t));
}

Vec maximize_af(const ScalarField& af, const Domain& domain, std::uint64_t seed,
                const AfMaxOptions& options) {
  if (options.n_seeds < 1) throw InputError("maximize_af: need at least one seed point");
  const int d = domain.dim();
  const Mat U = sobol_points(options.n_seeds, d, seed);
  std::vector<Vec> points(options.n_seeds);
  std::vector<double> values(options.n_seeds);
  for (int i = 0; i < options.n_seeds; ++i) {
    points[i] = domain.from_unit(U.row(i).transpose());
    const double v = af(points[i]);
    values[i] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  }
  std::vector<int> order(options.n_seeds);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });

  Vec best = points[order[0]];
  double best_value = values[order[0]];
  const int polish = std::min(options.restarts, options.n_seeds);
  const Vec step = 0.05 * domain.width();
  for (int r = 0; r < polish; ++r) {
    const BoxOptResult res = nelder_mead_maximize(af, points[order[r]], domain.lower(),
                                                  domain.upper(), step, options.polish_evals);
    if (res.value > best_value) {
      best_value = res.value;
      best = res.x;
    }
  }
  return domain.clip(best);
}

CandidatePair generate_pair(const GPModel& gp, const SoftCopeland& sc, const AcqConfig& cfg,
                            const RawYStats& stats, std::uint64_t seed,
                            const AfMaxOptions& options) {
  cfg.validate();
  CandidatePair out;
  out.x1 = maximize_af([&](const Vec& x) { return ucb(gp, x, cfg.beta_sqrt); }, gp.domain(), seed,
                       options);
  out.x2 = maximize_af([&](const Vec& x) { return coexbo_af(gp, sc, x, cfg, stats); }, gp.domain(),
                       seed, options);
  return out;
}

Vec thompson_candidate(const GPModel& gp, std::uint64_t seed, int grid_size) {
  const Domain& dom = gp.domain();
  const Mat X = dom.rows_from_unit(sobol_points(grid_size, dom.dim(), derive_seed(seed, 1)));
  const Mat draw = sample_posterior(gp, X, 1, derive_seed(seed, 2));
  Eigen::Index idx = 0;
  draw.row(0).maxCoeff(&idx);
  return X.row(idx).transpose();
}

double regret_ratio(double scaled_belief_var, double decay_term, double var_x1) {
  if (!(var_x1 > 0.0)) {
    throw InputError("regret_ratio: posterior variance at x1 must be positive");
  }
  const double b = std::max(scaled_belief_var, 0.0) + std::max(decay_term, 0.0);
  return std::sqrt(b / (b + var_x1));
}

RegretDiagnostics regret_ratio_bound(const GPModel& gp_prev, const SoftCopeland& sc_prev,
                                     const Vec& x1, const Vec& x2, const AcqConfig& cfg,
                                     const RawYStats& stats) {
  cfg.validate();
  const Prediction p1 = posterior(gp_prev, x1);
  const Prediction p2 = posterior(gp_prev, x2);
  if (!(p1.variance > 0.0)) {
    throw InputError("regret_ratio_bound: posterior variance at x1 is zero; bound undefined");
  }
  // The bound is stated for the model that generated the pair, i.e. decay (t-1)^2.
  const double tm1 = static_cast<double>(cfg.t - 1);
  const Vec u2 = sc_prev.domain().to_unit(x2);
  const ScaledBelief b0 = scale_belief(sc_prev.mean_at_unit(u2), sc_prev.var_at_unit(u2), stats, 0.0, cfg);
  const double decay = cfg.gamma * tm1 * tm1 * p2.variance;
  RegretDiagnostics out;
  out.r_ratio_bound = regret_ratio(b0.var_pi, decay, p1.variance);
  const double var_pi = b0.var_pi + decay;
  const GaussianMoments m = product_of_gaussians(b0.mu_pi, var_pi, p2.mean, p2.variance);
  out.delta_mu = std::abs(p1.mean - m.mean) / (2.0 * cfg.beta_sqrt * std::sqrt(p1.variance));
  return out;
}

double finite_domain_beta(int domain_size, int t, double delta) {
  if (domain_size < 1 || t < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw InputError("finite_domain_beta: need |D| >= 1, t >= 1, 0 < delta < 1");
  }
  const double pt = std::numbers::pi * std::numbers::pi * t * static_cast<double>(t) / 6.0;
  return 2.0 * std::log(domain_size * pt / delta);
}

}  // namespace coexbo
