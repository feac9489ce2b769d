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

#include "coexbo/preference.hpp"

#include "coexbo/gp.hpp"
#include "coexbo/optimize.hpp"
#include "coexbo/random.hpp"
#include "coexbo/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace coexbo {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
// Likelihood fits stop once a step improves the LML by under 1e-9 relative.
constexpr double kFitFtol = 1e-9;

// Defined through the nonnegative branch so that sigmoid(-z) == 1 - sigmoid(z)
// holds bit for bit; antithetic pairs then sum to exactly one at z = 0.
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  return 1.0 - 1.0 / (1.0 + std::exp(z));
}

// Squared differences per base dimension, summed over both halves of the
// joint input: D[k](i, j) = (u_ik - u_jk)^2 + (u_i,d+k - u_j,d+k)^2.
std::vector<Mat> tied_sq_diffs(const Mat& U, int d) {
  const Eigen::Index n = U.rows();
  std::vector<Mat> D(d, Mat(n, n));
  for (int k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = U(i, k) - U(j, k);
        const double b = U(i, d + k) - U(j, d + k);
        D[k](i, j) = a * a + b * b;
      }
    }
  }
  return D;
}

Vec tied_lengthscales(const Vec& ls) {
  Vec out(2 * ls.size());
  out << ls, ls;
  return out;
}

Mat joint_unit_inputs(const Domain& domain, const std::vector<DuelRecord>& aug) {
  const int d = domain.dim();
  Mat U(static_cast<Eigen::Index>(aug.size()), 2 * d);
  for (std::size_t i = 0; i < aug.size(); ++i) {
    U.row(static_cast<Eigen::Index>(i)) << domain.to_unit(aug[i].x1).transpose(),
        domain.to_unit(aug[i].x2).transpose();
  }
  return U;
}

Eigen::VectorXi labels_of(const std::vector<DuelRecord>& duels) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(duels.size()));
  for (std::size_t i = 0; i < duels.size(); ++i) y[static_cast<Eigen::Index>(i)] = duels[i].y_pref;
  return y;
}

void validate_duels(const std::vector<DuelRecord>& duels, const Domain& domain) {
  for (std::size_t i = 0; i < duels.size(); ++i) {
    const DuelRecord& r = duels[i];
    if (r.x1.size() != domain.dim() || r.x2.size() != domain.dim()) {
      throw InputError("duel " + std::to_string(i) + ": dimension mismatch");
    }
    if (!domain.contains(r.x1, 1e-9) || !domain.contains(r.x2, 1e-9)) {
      throw InputError("duel " + std::to_string(i) + ": point outside the domain");
    }
    if (r.y_pref != 0 && r.y_pref != 1) {
      throw InputError("duel " + std::to_string(i) + ": y_pref must be 0 or 1");
    }
  }
}

// Antithetic Monte Carlo over the latent difference D ~ N(mu, s^2).
PreferenceProbability softmax_moments(double mu, double s, int n_mc, std::uint64_t seed) {
  Rng rng(seed);
  double sum = 0.0, sum_var = 0.0;
  for (int i = 0; i + 1 < n_mc; i += 2) {
    const double z = rng.normal();
    const double a = sigmoid(mu + s * z);
    const double b = sigmoid(mu - s * z);
    sum += a + b;
    sum_var += a * (1.0 - a) + b * (1.0 - b);
  }
  if (n_mc % 2 == 1) {
    const double a = sigmoid(mu + s * rng.normal());
    sum += a;
    sum_var += a * (1.0 - a);
  }
  PreferenceProbability out;
  out.prob_mean = sum / n_mc;
  out.prob_var = sum_var / n_mc;
  return out;
}

struct PrefObjective {
  const std::vector<Mat>* D;
  const DirichletTargets* dir;
  int d;

  double operator()(const Vec& theta, Vec* grad) const {
    const Eigen::Index n = dir->targets.cols();
    const double v = std::exp(theta[0]);
    const double c = theta[d + 1];
    Mat R = Mat::Zero(n, n);
    for (int k = 0; k < d; ++k) R.noalias() += (*D)[k] * (-0.5 * std::exp(-2.0 * theta[1 + k]));
    R = v * R.array().exp().matrix();
    double value = 0.0;
    Mat Qsum;
    if (grad) Qsum = Mat::Zero(n, n);
    double dc = 0.0;
    for (int ch = 0; ch < 2; ++ch) {
      Mat K = R;
      K.diagonal() += dir->noise_vars.row(ch).transpose();
      Eigen::LLT<Mat> llt(K);
      if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
      const Vec r = dir->targets.row(ch).transpose().array() - c;
      const Vec alpha = llt.solve(r);
      const Mat& L = llt.matrixLLT();
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(L(i, i));
      value += -0.5 * r.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
      if (grad) {
        Qsum.noalias() += alpha * alpha.transpose();
        Qsum -= llt.solve(Mat::Identity(n, n));
        dc += alpha.sum();
      }
    }
    if (grad) {
      grad->resize(theta.size());
      const Mat QR = Qsum.cwiseProduct(R);
      (*grad)[0] = 0.5 * QR.sum();
      for (int k = 0; k < d; ++k) {
        (*grad)[1 + k] = 0.5 * QR.cwiseProduct((*D)[k]).sum() * std::exp(-2.0 * theta[1 + k]);
      }
      (*grad)[d + 1] = dc;
    }
    return value;
  }
};

Vec pack_pref(const PrefParams& p) {
  const Eigen::Index d = p.lengthscales.size();
  Vec theta(d + 2);
  theta[0] = std::log(p.outputscale);
  theta.segment(1, d) = p.lengthscales.array().log();
  theta[d + 1] = p.constant_mean;
  return theta;
}

PrefParams unpack_pref(const Vec& theta, int d) {
  PrefParams p;
  p.outputscale = std::exp(theta[0]);
  p.lengthscales = theta.segment(1, d).array().exp();
  p.constant_mean = theta[d + 1];
  return p;
}

// Zero-mean isotropic RBF regression used by the quadrature surrogates.
struct BQObjective {
  const Mat* D2;
  const Vec* y;

  double operator()(const Vec& theta, Vec* grad) const {
    const Eigen::Index n = y->size();
    const double v = std::exp(theta[0]);
    const double inv_l2 = std::exp(-2.0 * theta[1]);
    const double lam = std::exp(theta[2]);
    const Mat R = v * ((*D2) * (-0.5 * inv_l2)).array().exp().matrix();
    Mat K = R;
    K.diagonal().array() += lam;
    Eigen::LLT<Mat> llt(K);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const Vec alpha = llt.solve(*y);
    const Mat& L = llt.matrixLLT();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(L(i, i));
    const double value = -0.5 * y->dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
    if (grad) {
      Mat Q = alpha * alpha.transpose();
      Q -= llt.solve(Mat::Identity(n, n));
      const Mat QR = Q.cwiseProduct(R);
      grad->resize(3);
      (*grad)[0] = 0.5 * QR.sum();
      (*grad)[1] = 0.5 * QR.cwiseProduct(*D2).sum() * inv_l2;
      (*grad)[2] = 0.5 * lam * Q.trace();
    }
    return value;
  }
};

constexpr double kBQMinOutputscale = 1e-4;
constexpr double kBQMaxOutputscale = 1e2;
constexpr double kBQMinLengthscale = 1e-2;
constexpr double kBQMaxLengthscale = 10.0;
constexpr double kBQMinNoise = 1e-6;
constexpr double kBQMaxNoise = 1.0;

Mat sq_dist(const Mat& U) {
  const Eigen::Index n = U.rows();
  Mat D2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) D2(i, j) = (U.row(i) - U.row(j)).squaredNorm();
  }
  return D2;
}

BQParams fit_bq(const Mat& D2, const Vec& y, std::uint64_t seed, int restarts, int max_iters,
                const std::optional<BQParams>& warm) {
  Vec lo(3), hi(3);
  lo << std::log(kBQMinOutputscale), std::log(kBQMinLengthscale), std::log(kBQMinNoise);
  hi << std::log(kBQMaxOutputscale), std::log(kBQMaxLengthscale), std::log(kBQMaxNoise);
  std::vector<Vec> starts;
  if (warm) {
    Vec t(3);
    t << std::log(warm->outputscale), std::log(warm->lengthscale), std::log(warm->noise);
    starts.push_back(t.cwiseMax(lo).cwiseMin(hi));
  }
  const double scale = std::max(y.squaredNorm() / std::max<Eigen::Index>(y.size(), 1), 1e-3);
  {
    Vec t(3);
    t << std::log(scale), std::log(0.3), std::log(1e-3);
    starts.push_back(t.cwiseMax(lo).cwiseMin(hi));
  }
  Rng rng(seed);
  while (static_cast<int>(starts.size()) < std::max(restarts, 1)) {
    Vec t(3);
    t << std::log(scale) + rng.uniform(-1.5, 1.5), rng.uniform(std::log(0.05), std::log(2.0)),
        rng.uniform(std::log(1e-5), std::log(1e-2));
    starts.push_back(t.cwiseMax(lo).cwiseMin(hi));
  }
  starts.resize(std::max(restarts, 1));
  const BQObjective obj{&D2, &y};
  Vec best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Vec& s : starts) {
    const BoxOptResult r = maximize_box_lbfgs(std::cref(obj), s, lo, hi, max_iters, 1e-6, kFitFtol);
    if (std::isfinite(r.value) && r.value > best_value) {
      best_value = r.value;
      best = r.x;
    }
  }
  if (best.size() == 0) throw NumericalError("build_soft_copeland: surrogate fit failed at every restart");
  return BQParams{std::exp(best[0]), std::exp(best[1]), std::exp(best[2])};
}

}  // namespace

std::vector<DuelRecord> augment_duels(const std::vector<DuelRecord>& duels) {
  std::vector<DuelRecord> out = duels;
  out.reserve(2 * duels.size());
  for (const DuelRecord& r : duels) out.push_back(DuelRecord{r.x2, r.x1, 1 - r.y_pref});
  return out;
}

DirichletTargets dirichlet_transform(const Eigen::VectorXi& labels, double alpha_eps) {
  if (!(alpha_eps > 0.0)) throw InputError("dirichlet_transform: alpha_eps must be positive");
  const Eigen::Index n = labels.size();
  DirichletTargets out{Mat(2, n), Mat(2, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < 2; ++c) {
      const double a = (labels[i] == c ? 1.0 : 0.0) + alpha_eps;
      const double s2 = std::log(1.0 / a + 1.0);
      out.noise_vars(c, i) = s2;
      out.targets(c, i) = std::log(a) - 0.5 * s2;
    }
  }
  return out;
}

PreferenceGP::PreferenceGP(Domain domain, std::vector<DuelRecord> duels, double alpha_eps,
                           PrefParams params)
    : domain_(std::move(domain)),
      duels_(std::move(duels)),
      alpha_eps_(alpha_eps),
      params_(std::move(params)) {
  if (duels_.empty()) throw InputError("PreferenceGP: no duels");
  validate_duels(duels_, domain_);
  const int d = domain_.dim();
  if (params_.lengthscales.size() != d || !(params_.lengthscales.array() > 0.0).all() ||
      !(params_.outputscale > 0.0)) {
    throw InputError("PreferenceGP: invalid kernel parameters");
  }
  const std::vector<DuelRecord> aug = augment_duels(duels_);
  U_ = joint_unit_inputs(domain_, aug);
  dir_ = dirichlet_transform(labels_of(aug), alpha_eps_);
  const Mat R = rbf_gram(U_, U_, params_.outputscale, tied_lengthscales(params_.lengthscales));
  for (int c = 0; c < 2; ++c) {
    Mat K = R;
    K.diagonal() += dir_.noise_vars.row(c).transpose();
    chol_[c] = robust_cholesky(K, "PreferenceGP").lower;
    const Vec r = dir_.targets.row(c).transpose().array() - params_.constant_mean;
    alpha_[c] = chol_[c].triangularView<Eigen::Lower>().solve(r);
    chol_[c].triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_[c]);
  }
}

PreferenceGP::Latent PreferenceGP::latent_unit(const Vec& u_joint) const {
  const Vec k =
      rbf_gram(U_, u_joint.transpose(), params_.outputscale, tied_lengthscales(params_.lengthscales))
          .col(0);
  Latent out{};
  for (int c = 0; c < 2; ++c) {
    out.mean[c] = params_.constant_mean + k.dot(alpha_[c]);
    const Vec w = chol_[c].triangularView<Eigen::Lower>().solve(k);
    out.var[c] = std::max(params_.outputscale - w.squaredNorm(), 0.0);
  }
  return out;
}

PreferenceGP::Latent PreferenceGP::latent(const Vec& x1, const Vec& x2) const {
  check_dim(x1, dim(), "PreferenceGP::latent");
  check_dim(x2, dim(), "PreferenceGP::latent");
  Vec u(2 * dim());
  u << domain_.to_unit(x1), domain_.to_unit(x2);
  return latent_unit(u);
}

void PreferenceGP::latent_at_training(Mat& means, Mat& vars) const {
  const Eigen::Index n = U_.rows();
  const Mat R = rbf_gram(U_, U_, params_.outputscale, tied_lengthscales(params_.lengthscales));
  means.resize(2, n);
  vars.resize(2, n);
  for (int c = 0; c < 2; ++c) {
    means.row(c) = (params_.constant_mean + (R * alpha_[c]).array()).transpose();
    const Mat W = chol_[c].triangularView<Eigen::Lower>().solve(R);
    vars.row(c) = (params_.outputscale - W.colwise().squaredNorm().array()).cwiseMax(0.0);
  }
}

PreferenceGP fit_preference_gp(const std::vector<DuelRecord>& duels, const Domain& domain,
                               double alpha_eps, std::uint64_t seed,
                               const PrefFitOptions& options) {
  if (duels.size() < 2) throw InputError("fit_preference_gp: at least two duels are required");
  if (!(alpha_eps > 0.0)) throw InputError("fit_preference_gp: alpha_eps must be positive");
  validate_duels(duels, domain);
  bool informative = false;
  for (const DuelRecord& r : duels) informative = informative || (r.x1 != r.x2);
  if (!informative) {
    throw InputError("fit_preference_gp: all " + std::to_string(duels.size()) +
                     " duels compare a point with itself; nothing to learn");
  }
  const int d = domain.dim();
  const std::vector<DuelRecord> aug = augment_duels(duels);
  const Mat U = joint_unit_inputs(domain, aug);
  const DirichletTargets dir = dirichlet_transform(labels_of(aug), alpha_eps);
  const std::vector<Mat> D = tied_sq_diffs(U, d);

  Vec lo(d + 2), hi(d + 2);
  lo[0] = std::log(PrefBounds::min_outputscale);
  hi[0] = std::log(PrefBounds::max_outputscale);
  lo.segment(1, d).setConstant(std::log(PrefBounds::min_lengthscale));
  hi.segment(1, d).setConstant(std::log(PrefBounds::max_lengthscale));
  lo[d + 1] = PrefBounds::min_mean;
  hi[d + 1] = PrefBounds::max_mean;

  const double target_mean = dir.targets.mean();
  std::vector<Vec> starts;
  if (options.warm_start) starts.push_back(pack_pref(*options.warm_start).cwiseMax(lo).cwiseMin(hi));
  {
    PrefParams def{4.0, Vec::Constant(d, 0.3), target_mean};
    starts.push_back(pack_pref(def).cwiseMax(lo).cwiseMin(hi));
  }
  Rng rng(seed);
  while (static_cast<int>(starts.size()) < std::max(options.restarts, 1)) {
    Vec t(d + 2);
    t[0] = rng.uniform(std::log(0.5), std::log(20.0));
    for (int k = 0; k < d; ++k) t[1 + k] = rng.uniform(std::log(0.05), std::log(2.0));
    t[d + 1] = target_mean + rng.uniform(-2.0, 2.0);
    starts.push_back(t.cwiseMax(lo).cwiseMin(hi));
  }
  starts.resize(std::max(options.restarts, 1));

  const PrefObjective obj{&D, &dir, d};
  Vec best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Vec& s : starts) {
    const BoxOptResult r = maximize_box_lbfgs(std::cref(obj), s, lo, hi, options.max_iters, 1e-6, kFitFtol);
    if (std::isfinite(r.value) && r.value > best_value) {
      best_value = r.value;
      best = r.x;
    }
  }
  if (best.size() == 0) {
    throw NumericalError("fit_preference_gp: likelihood not finite at any restart (" +
                         std::to_string(duels.size()) + " duels)");
  }
  return PreferenceGP(domain, duels, alpha_eps, unpack_pref(best, d));
}

PreferenceProbability predict_preference(const PreferenceGP& g, const Vec& x1, const Vec& x2,
                                         int n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw InputError("predict_preference: n_mc must be at least 1");
  const PreferenceGP::Latent lat = g.latent(x1, x2);
  // Identical arms: the channel means agree analytically, rounding aside.
  const double mu = (x1 == x2) ? 0.0 : lat.mean[1] - lat.mean[0];
  return softmax_moments(mu, std::sqrt(lat.var[0] + lat.var[1]), n_mc, seed);
}

SoftCopeland::SoftCopeland(Domain domain, Mat nodes, Vec mean_targets, Vec var_targets,
                           BQParams mean_params, BQParams var_params)
    : domain_(std::move(domain)),
      nodes_(std::move(nodes)),
      mean_targets_(std::move(mean_targets)),
      var_targets_(std::move(var_targets)),
      mean_params_(mean_params),
      var_params_(var_params) {
  const int d = domain_.dim();
  if (nodes_.cols() != 2 * d) throw InputError("SoftCopeland: nodes must have 2d columns");
  if (mean_targets_.size() != nodes_.rows() || var_targets_.size() != nodes_.rows()) {
    throw InputError("SoftCopeland: target length does not match node count");
  }
  offset_mean_ = mean_targets_.size() > 0 ? mean_targets_.mean() : 0.0;
  offset_var_ = var_targets_.size() > 0 ? var_targets_.mean() : 0.0;
  auto weights = [&](const BQParams& p, const Vec& y) {
    if (!(p.outputscale > 0.0 && p.lengthscale > 0.0 && p.noise > 0.0)) {
      throw InputError("SoftCopeland: invalid surrogate parameters");
    }
    Mat K = rbf_gram(nodes_, nodes_, p.outputscale, Vec::Constant(2 * d, p.lengthscale));
    K.diagonal().array() += p.noise;
    const Mat L = robust_cholesky(K, "SoftCopeland").lower;
    Vec w = L.triangularView<Eigen::Lower>().solve(y);
    L.triangularView<Eigen::Lower>().transpose().solveInPlace(w);
    return w;
  };
  omega_mean_ = weights(mean_params_, (mean_targets_.array() - offset_mean_).matrix());
  omega_var_ = weights(var_params_, (var_targets_.array() - offset_var_).matrix());
  const double two_pi = 2.0 * std::numbers::pi;
  vprime_mean_ = mean_params_.outputscale *
                 std::pow(two_pi * mean_params_.lengthscale * mean_params_.lengthscale, d);
  vprime_var_ = var_params_.outputscale *
                std::pow(two_pi * var_params_.lengthscale * var_params_.lengthscale, d);
  const double mass = offset_mean_ + vprime_mean_ * omega_mean_.sum();
  constexpr double kEps = 1e-8;
  clamped_ = !(mass > kEps);
  v_x_ = std::sqrt(clamped_ ? kEps : mass);
}

namespace {

// v' * sum_i w_i N_d(u; a_i, l^2 I), with the Gaussian normalization folded
// into the scale so that tiny lengthscales do not overflow.
double marginal_sum(const Mat& nodes, const Vec& w, const BQParams& p, const Vec& u) {
  const Eigen::Index d = u.size();
  const double l2 = p.lengthscale * p.lengthscale;
  const double scale =
      p.outputscale * std::pow(2.0 * std::numbers::pi * l2, 0.5 * static_cast<double>(d));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < nodes.rows(); ++i) {
    const double q = (nodes.row(i).head(d).transpose() - u).squaredNorm();
    acc += w[i] * std::exp(-0.5 * q / l2);
  }
  return scale * acc;
}

}  // namespace

double SoftCopeland::mean_at_unit(const Vec& u) const {
  return (offset_mean_ + marginal_sum(nodes_, omega_mean_, mean_params_, u)) / v_x_;
}

double SoftCopeland::var_at_unit(const Vec& u) const {
  return std::max((offset_var_ + marginal_sum(nodes_, omega_var_, var_params_, u)) / v_x_, 0.0);
}

double copeland_mean(const SoftCopeland& sc, const Vec& x) {
  check_dim(x, sc.domain().dim(), "copeland_mean");
  return sc.mean_at_unit(sc.domain().to_unit(x));
}

double copeland_var(const SoftCopeland& sc, const Vec& x) {
  check_dim(x, sc.domain().dim(), "copeland_var");
  return sc.var_at_unit(sc.domain().to_unit(x));
}

SoftCopeland build_soft_copeland(const PreferenceGP& g, int n_mc, std::uint64_t seed,
                                 const BQFitOptions& options) {
  if (n_mc < 1) throw InputError("build_soft_copeland: n_mc must be at least 1");
  Mat means, vars;
  g.latent_at_training(means, vars);
  const Eigen::Index n = means.cols();
  Vec y_mean(n), y_var(n);
  // One shared stream for every node keeps mirrored nodes exactly complementary.
  const std::uint64_t mc_seed = derive_seed(seed, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PreferenceProbability p = softmax_moments(
        means(1, i) - means(0, i), std::sqrt(vars(0, i) + vars(1, i)), n_mc, mc_seed);
    y_mean[i] = p.prob_mean;
    y_var[i] = p.prob_var;
  }
  const Mat D2 = sq_dist(g.joint_inputs());
  const BQParams pm =
      fit_bq(D2, (y_mean.array() - y_mean.mean()).matrix(), derive_seed(seed, 2), options.restarts, options.max_iters, options.warm_mean);
  const BQParams pv =
      fit_bq(D2, (y_var.array() - y_var.mean()).matrix(), derive_seed(seed, 3), options.restarts, options.max_iters, options.warm_var);
  return SoftCopeland(g.domain(), g.joint_inputs(), y_mean, y_var, pm, pv);
}

double mc_soft_copeland(const PreferenceGP& g, const Vec& x, int n_samples, int n_mc,
                        std::uint64_t seed) {
  if (n_samples < 1) throw InputError("mc_soft_copeland: n_samples must be at least 1");
  Rng rng(seed);
  double acc = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const Vec u = rng.uniform_in(g.domain());
    acc += predict_preference(g, x, u, n_mc, derive_seed(seed, static_cast<std::uint64_t>(j) + 1))
               .prob_mean;
  }
  return acc / n_samples;
}

BeliefSamples sample_from_belief(const SoftCopeland& sc, int count, std::uint64_t seed) {
  if (count < 0) throw InputError("sample_from_belief: negative count");
  const int d = sc.domain().dim();
  const Mat grid = sobol_points(kBeliefGridSize, d);
  Vec cum(kBeliefGridSize);
  double total = 0.0;
  for (int i = 0; i < kBeliefGridSize; ++i) {
    total += std::max(sc.mean_at_unit(grid.row(i).transpose()), 0.0);
    cum[i] = total;
  }
  BeliefSamples out;
  out.uniform_fallback = !(total > 0.0) || !std::isfinite(total);
  out.X.resize(count, d);
  Rng rng(seed);
  for (int r = 0; r < count; ++r) {
    int idx;
    if (out.uniform_fallback) {
      idx = rng.uniform_int(kBeliefGridSize);
    } else {
      const double target = rng.uniform() * total;
      idx = static_cast<int>(std::upper_bound(cum.data(), cum.data() + kBeliefGridSize, target) -
                             cum.data());
      idx = std::min(idx, kBeliefGridSize - 1);
    }
    out.X.row(r) = sc.domain().from_unit(grid.row(idx).transpose()).transpose();
  }
  return out;
}

}  // namespace coexbo
