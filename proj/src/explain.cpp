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

#include "coexbo/explain.hpp"

#include "coexbo/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace coexbo {

double default_lambda_s(const GPModel& gp) { return 1e-6 * std::max(gp.size(), 1); }

CoalitionGame::CoalitionGame(const GPModel& gp, const Vec& x, double lambda_s)
    : gp_(&gp), d_(gp.dim()), lambda_s_(lambda_s) {
  check_dim(x, d_, "CoalitionGame");
  if (gp.size() < 1) throw InputError("CoalitionGame: the model has no training inputs");
  if (!(lambda_s >= 0.0)) throw InputError("CoalitionGame: lambda_S must be nonnegative");
  if (d_ > kMaxShapleyDim) {
    throw UnsupportedError("exact Shapley enumeration supports at most " +
                           std::to_string(kMaxShapleyDim) + " dimensions, got " +
                           std::to_string(d_));
  }
  u_ = gp.domain().to_unit(x);
  prior_mean_ = gp.prior_mean_raw();
  f_tilde_ = posterior_mean(gp, gp.data().X);
  k_tilde_ = posterior_cov(gp, gp.data().X, gp.data().X);
}

CoalitionGame::Value CoalitionGame::value(std::uint32_t mask) const {
  const int n = gp_->size();
  Vec B;
  if (mask == 0) {
    // Empty product of kernel factors: (v 11^T + lambda I)^{-1} v 1 in closed form.
    const double v = gp_->params().outputscale;
    B = Vec::Constant(n, v / (n * v + lambda_s_));
  } else {
    const Mat& U = gp_->unit_inputs();
    const KernelParams& p = gp_->params();
    Mat A = Mat::Zero(n, n);
    Vec r = Vec::Zero(n);
    for (int k = 0; k < d_; ++k) {
      if (!(mask & (1u << k))) continue;
      const double inv = 1.0 / (p.lengthscales[k] * p.lengthscales[k]);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double diff = U(i, k) - U(j, k);
          A(i, j) += diff * diff * inv;
        }
        const double dx = U(j, k) - u_[k];
        r[j] += dx * dx * inv;
      }
    }
    A = p.outputscale * (-0.5 * A.array()).exp().matrix();
    r = p.outputscale * (-0.5 * r.array()).exp().matrix();
    A.diagonal().array() += lambda_s_;
    const Mat L = robust_cholesky(A, "CoalitionGame").lower;
    B = L.triangularView<Eigen::Lower>().solve(r);
    L.triangularView<Eigen::Lower>().transpose().solveInPlace(B);
  }
  Value v;
  v.mean = prior_mean_ + B.dot((f_tilde_.array() - prior_mean_).matrix());
  v.std = std::sqrt(std::max(B.dot(k_tilde_ * B), 0.0));
  return v;
}

namespace {

double pick(const CoalitionGame::Value& v, double beta_sqrt, ShapleyTarget target) {
  switch (target) {
    case ShapleyTarget::mean:
      return v.mean;
    case ShapleyTarget::std:
      return v.std;
    case ShapleyTarget::af:
      break;
  }
  return v.mean + beta_sqrt * v.std;
}

// c_k = 1 / (d * C(d-1, k)).
std::vector<double> shapley_weights(int d) {
  std::vector<double> c(d);
  for (int k = 0; k < d; ++k) {
    double binom = 1.0;
    for (int i = 1; i <= k; ++i) binom = binom * (d - 1 - k + i) / i;
    c[k] = 1.0 / (d * binom);
  }
  return c;
}

ShapleyAttribution attribute(const std::vector<double>& nu, int d, ShapleyTarget target) {
  const std::vector<double> c = shapley_weights(d);
  ShapleyAttribution out;
  out.target = target;
  out.base = nu[0];
  out.phi = Vec::Zero(d);
  const std::uint32_t full = (1u << d);
  for (int j = 0; j < d; ++j) {
    const std::uint32_t bit = 1u << j;
    double acc = 0.0;
    for (std::uint32_t s = 0; s < full; ++s) {
      if (s & bit) continue;
      acc += c[std::popcount(s)] * (nu[s | bit] - nu[s]);
    }
    out.phi[j] = acc;
  }
  return out;
}

}  // namespace

double value_function(const GPModel& gp, const Vec& x, const std::vector<int>& subset,
                      double beta_sqrt, double lambda_s, ShapleyTarget target) {
  const CoalitionGame game(gp, x, lambda_s);
  std::uint32_t mask = 0;
  for (int k : subset) {
    if (k < 0 || k >= game.dim()) throw InputError("value_function: feature index out of range");
    mask |= 1u << k;
  }
  return pick(game.value(mask), beta_sqrt, target);
}

ShapleyTriple shapley_triple(const GPModel& gp, const Vec& x, double beta_sqrt,
                             std::optional<double> lambda_s) {
  const CoalitionGame game(gp, x, lambda_s.value_or(default_lambda_s(gp)));
  const int d = game.dim();
  const std::uint32_t full = 1u << d;
  std::vector<double> nu_af(full), nu_mean(full), nu_std(full);
  for (std::uint32_t s = 0; s < full; ++s) {
    const CoalitionGame::Value v = game.value(s);
    nu_mean[s] = v.mean;
    nu_std[s] = v.std;
    nu_af[s] = v.mean + beta_sqrt * v.std;
  }
  return ShapleyTriple{attribute(nu_af, d, ShapleyTarget::af),
                       attribute(nu_mean, d, ShapleyTarget::mean),
                       attribute(nu_std, d, ShapleyTarget::std)};
}

ShapleyAttribution shapley_values(const GPModel& gp, const Vec& x, double beta_sqrt,
                                  ShapleyTarget target, std::optional<double> lambda_s) {
  const CoalitionGame game(gp, x, lambda_s.value_or(default_lambda_s(gp)));
  const int d = game.dim();
  std::vector<double> nu(1u << d);
  for (std::uint32_t s = 0; s < nu.size(); ++s) nu[s] = pick(game.value(s), beta_sqrt, target);
  return attribute(nu, d, target);
}

std::pair<int, int> top2_dims(const ShapleyAttribution& a1, const ShapleyAttribution& a2) {
  const Eigen::Index d = a1.phi.size();
  if (a2.phi.size() != d) throw InputError("top2_dims: attribution sizes differ");
  if (d < 2) throw InputError("top2_dims: need at least two dimensions");
  const Vec score = 0.5 * (a1.phi.cwiseAbs() + a2.phi.cwiseAbs());
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
  return {order[0], order[1]};
}

Rect view_rectangle(const Vec& x1, const Vec& x2, const Vec& x_best, const Domain& domain,
                    const std::vector<int>& dims) {
  Rect r;
  const Eigen::Index m = static_cast<Eigen::Index>(dims.size());
  r.lo.resize(m);
  r.hi.resize(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int k = dims[static_cast<std::size_t>(a)];
    if (k < 0 || k >= domain.dim()) throw InputError("view_rectangle: dimension index out of range");
    const double lo = std::min({x1[k], x2[k], x_best[k]});
    const double hi = std::max({x1[k], x2[k], x_best[k]});
    const double centre = 0.5 * (lo + hi);
    double half = hi - lo;  // doubled width, halved
    if (!(half > 0.0)) half = 0.05 * (domain.upper()[k] - domain.lower()[k]);
    r.lo[a] = std::max(centre - half, domain.lower()[k]);
    r.hi[a] = std::min(centre + half, domain.upper()[k]);
  }
  return r;
}

SelectionFeedback selection_accuracy(const GPModel& gp_after, const Vec& x1, const Vec& x2,
                                     int n_mc, std::uint64_t seed) {
  check_dim(x1, gp_after.dim(), "selection_accuracy");
  check_dim(x2, gp_after.dim(), "selection_accuracy");
  if (n_mc < 1) throw InputError("selection_accuracy: n_mc must be at least 1");
  if (x1 == x2) return SelectionFeedback{0.5, 0.0};
  Mat X(2, gp_after.dim());
  X.row(0) = x1.transpose();
  X.row(1) = x2.transpose();
  const Vec mean = posterior_mean(gp_after, X);
  const Mat cov = posterior_cov(gp_after, X, X);
  // Symmetric square root with clamped eigenvalues: valid even when the 2x2
  // covariance is singular.
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  const Mat A = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const double scale = std::sqrt(gp_after.noise_raw());
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n_mc; ++s) {
    Vec z(2);
    z[0] = rng.normal();
    z[1] = rng.normal();
    const Vec f = mean + A * z;
    const double l = 0.5 * std::erfc(-(f[0] - f[1]) / scale / std::sqrt(2.0));
    sum += l;
    sum_sq += l * l;
  }
  SelectionFeedback out;
  out.prob_mean = sum / n_mc;
  out.prob_var = std::max(sum_sq / n_mc - out.prob_mean * out.prob_mean, 0.0);
  return out;
}

ExplanationBundle build_bundle(const GPModel& gp, const SoftCopeland* sc, const Vec& x1,
                               const Vec& x2, const Vec& x_best, double beta_sqrt) {
  const Domain& dom = gp.domain();
  const int d = dom.dim();
  ExplanationBundle b;
  b.candidates.push_back({x1, shapley_triple(gp, x1, beta_sqrt)});
  b.candidates.push_back({x2, shapley_triple(gp, x2, beta_sqrt)});
  if (d >= 2) {
    const auto [i, j] = top2_dims(b.candidates[0].shapley.af, b.candidates[1].shapley.af);
    b.top2 = {i, j};
  } else {
    b.top2 = {0};
  }
  b.rect = view_rectangle(x1, x2, x_best, dom, b.top2);

  const int cols = kHeatmapSize;
  const int rows = d >= 2 ? kHeatmapSize : 1;
  const Vec mid = 0.5 * (x1 + x2);
  auto axis = [](double lo, double hi, int k, int n) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (n - 1);
  };
  Mat pts(rows * cols, d);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Vec p = mid;
      p[b.top2[0]] = axis(b.rect.lo[0], b.rect.hi[0], c, cols);
      if (d >= 2) p[b.top2[1]] = axis(b.rect.lo[1], b.rect.hi[1], r, rows);
      pts.row(r * cols + c) = p.transpose();
    }
  }
  const Vec means = posterior_mean(gp, pts);
  b.gp_mean.resize(rows, cols);
  b.gp_std.resize(rows, cols);
  if (sc) b.belief.resize(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Vec p = pts.row(r * cols + c).transpose();
      b.gp_mean(r, c) = means[r * cols + c];
      b.gp_std(r, c) = std::sqrt(posterior(gp, p).variance);
      if (sc) b.belief(r, c) = copeland_mean(*sc, p);
    }
  }
  return b;
}

}  // namespace coexbo
