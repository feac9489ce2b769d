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

#include "coexbo/gp.hpp"

#include "coexbo/optimize.hpp"
#include "coexbo/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <string>
#include <vector>

namespace coexbo {

void KernelParams::validate(int dim) const {
  if (lengthscales.size() != dim) {
    throw InputError("KernelParams: expected " + std::to_string(dim) + " lengthscales, got " +
                     std::to_string(lengthscales.size()));
  }
  if (!(outputscale > 0.0)) throw InputError("KernelParams: outputscale must be positive");
  if (!(noise > 0.0)) throw InputError("KernelParams: noise must be positive");
  if (!(lengthscales.array() > 0.0).all()) throw InputError("KernelParams: lengthscales must be positive");
  if (!std::isfinite(constant_mean)) throw InputError("KernelParams: constant_mean must be finite");
}

double rbf_kernel(const Vec& x1, const Vec& x2, const KernelParams& params) {
  if (x1.size() != x2.size() || x1.size() != params.lengthscales.size()) {
    throw InputError("rbf_kernel: dimension mismatch");
  }
  const double q = (x1 - x2).cwiseQuotient(params.lengthscales).squaredNorm();
  return params.outputscale * std::exp(-0.5 * q);
}

Mat rbf_gram(const Mat& A, const Mat& B, double outputscale, const Vec& lengthscales) {
  if (A.cols() != lengthscales.size() || B.cols() != lengthscales.size()) {
    throw InputError("rbf_gram: dimension mismatch");
  }
  const Vec inv = lengthscales.cwiseInverse();
  const Mat As = A * inv.asDiagonal();
  const Mat Bs = B * inv.asDiagonal();
  Mat K(A.rows(), B.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      K(i, j) = outputscale * std::exp(-0.5 * (As.row(i) - Bs.row(j)).squaredNorm());
    }
  }
  return K;
}

CholeskyFactor robust_cholesky(const Mat& A, const char* context) {
  const Eigen::Index n = A.rows();
  CholeskyFactor out;
  if (n == 0) {
    out.lower = Mat(0, 0);
    return out;
  }
  Eigen::LLT<Mat> llt(A);
  if (llt.info() == Eigen::Success) {
    out.lower = llt.matrixL();
    return out;
  }
  const double scale = std::max(A.diagonal().mean(), std::numeric_limits<double>::min());
  for (double rel = 1e-8; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
    Mat B = A;
    B.diagonal().array() += rel * scale;
    llt.compute(B);
    if (llt.info() == Eigen::Success) {
      out.lower = llt.matrixL();
      out.jitter = rel * scale;
      return out;
    }
  }
  std::ostringstream msg;
  msg << context << ": matrix not positive definite after jitter escalation (n=" << n
      << ", mean diagonal=" << A.diagonal().mean() << ", min diagonal=" << A.diagonal().minCoeff()
      << ", max jitter=" << 1e-4 * scale << ")";
  throw NumericalError(msg.str());
}

std::pair<double, double> standardization(const Vec& y) {
  if (y.size() == 0) return {0.0, 1.0};
  const double mean = y.mean();
  if (y.size() < 2) return {mean, 1.0};
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
  const double sd = std::sqrt(var);
  return {mean, sd > 0.0 ? sd : 1.0};
}

GPModel::GPModel(Domain domain, Dataset data, KernelParams params, double y_mean, double y_std)
    : domain_(std::move(domain)),
      data_(std::move(data)),
      params_(std::move(params)),
      y_mean_(y_mean),
      y_std_(y_std) {
  params_.validate(domain_.dim());
  if (!(y_std_ > 0.0)) throw InputError("GPModel: y_std must be positive");
  if (data_.X.rows() == 0) data_.X.resize(0, domain_.dim());
  data_.validate(domain_);
  unit_X_ = domain_.rows_to_unit(data_.X);
  const int n = data_.size();
  Mat K = rbf_gram(unit_X_, unit_X_, params_.outputscale, params_.lengthscales);
  K.diagonal().array() += params_.noise;
  CholeskyFactor f = robust_cholesky(K, "GPModel");
  chol_ = std::move(f.lower);
  jitter_ = f.jitter;
  Vec r(n);
  for (int i = 0; i < n; ++i) r[i] = (data_.y[i] - y_mean_) / y_std_ - params_.constant_mean;
  if (n > 0) {
    alpha_ = chol_.triangularView<Eigen::Lower>().solve(r);
    chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
  } else {
    alpha_ = Vec(0);
  }
}

GPModel GPModel::prior(Domain domain, KernelParams params) {
  Dataset empty;
  empty.X = Mat(0, domain.dim());
  empty.y = Vec(0);
  return GPModel(std::move(domain), std::move(empty), std::move(params), 0.0, 1.0);
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Hyperparameter vector layout: [log v, log l_1..l_d, log noise, mean].
Vec pack(const KernelParams& p) {
  const Eigen::Index d = p.lengthscales.size();
  Vec theta(d + 3);
  theta[0] = std::log(p.outputscale);
  theta.segment(1, d) = p.lengthscales.array().log();
  theta[d + 1] = std::log(p.noise);
  theta[d + 2] = p.constant_mean;
  return theta;
}

KernelParams unpack(const Vec& theta, int d) {
  KernelParams p;
  p.outputscale = std::exp(theta[0]);
  p.lengthscales = theta.segment(1, d).array().exp();
  p.noise = std::exp(theta[d + 1]);
  p.constant_mean = theta[d + 2];
  return p;
}

double lml_with_gradient(const Mat& U, const Vec& ys, const Vec& theta, Vec* grad) {
  const int n = static_cast<int>(U.rows());
  const int d = static_cast<int>(U.cols());
  const KernelParams p = unpack(theta, d);
  const Mat R = rbf_gram(U, U, 1.0, p.lengthscales);
  Mat K = p.outputscale * R;
  K.diagonal().array() += p.noise;
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Vec r = ys.array() - p.constant_mean;
  const Vec alpha = llt.solve(r);
  const Mat& L = llt.matrixLLT();
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(L(i, i));
  const double value = -0.5 * r.dot(alpha) - 0.5 * logdet - 0.5 * n * kLog2Pi;
  if (grad) {
    grad->resize(theta.size());
    const Mat Kinv = llt.solve(Mat::Identity(n, n));
    const Mat Q = alpha * alpha.transpose() - Kinv;
    const Mat QK = Q.cwiseProduct(R) * p.outputscale;  // Q o dK/dlog v
    (*grad)[0] = 0.5 * QK.sum();
    for (int k = 0; k < d; ++k) {
      const double inv_l2 = 1.0 / (p.lengthscales[k] * p.lengthscales[k]);
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double diff = U(i, k) - U(j, k);
          acc += QK(i, j) * diff * diff * inv_l2;
        }
      }
      (*grad)[1 + k] = 0.5 * acc;
    }
    (*grad)[d + 1] = 0.5 * p.noise * Q.trace();
    (*grad)[d + 2] = alpha.sum();
  }
  return value;
}

Vec lower_bounds(int d) {
  Vec lo(d + 3);
  lo[0] = std::log(GPBounds::min_outputscale);
  lo.segment(1, d).setConstant(std::log(GPBounds::min_lengthscale));
  lo[d + 1] = std::log(GPBounds::min_noise);
  lo[d + 2] = -GPBounds::max_abs_mean;
  return lo;
}

Vec upper_bounds(int d) {
  Vec hi(d + 3);
  hi[0] = std::log(GPBounds::max_outputscale);
  hi.segment(1, d).setConstant(std::log(GPBounds::max_lengthscale));
  hi[d + 1] = std::log(GPBounds::max_noise);
  hi[d + 2] = GPBounds::max_abs_mean;
  return hi;
}

}  // namespace

double log_marginal_likelihood(const Mat& U, const Vec& ys, const KernelParams& params) {
  params.validate(static_cast<int>(U.cols()));
  return lml_with_gradient(U, ys, pack(params), nullptr);
}

GPModel fit_gp(const Dataset& data, const Domain& domain, std::uint64_t seed,
               const GPFitOptions& options) {
  data.validate(domain);
  const int n = data.size();
  const int d = domain.dim();
  if (n < 2) throw InputError("fit_gp: at least two observations are required");

  const auto [y_mean, y_std] = standardization(data.y);
  const Vec ys = (data.y.array() - y_mean) / y_std;
  const Mat U = domain.rows_to_unit(data.X);
  const Vec lo = lower_bounds(d);
  const Vec hi = upper_bounds(d);

  std::vector<Vec> starts;
  if (options.warm_start) {
    options.warm_start->validate(d);
    starts.push_back(pack(*options.warm_start).cwiseMax(lo).cwiseMin(hi));
  }
  {
    KernelParams def;
    def.outputscale = 1.0;
    def.lengthscales = Vec::Constant(d, 0.3);
    def.noise = 1e-2;
    def.constant_mean = 0.0;
    starts.push_back(pack(def));
  }
  Rng rng(seed);
  while (static_cast<int>(starts.size()) < std::max(options.restarts, 1)) {
    Vec theta(d + 3);
    theta[0] = rng.uniform(std::log(0.2), std::log(5.0));
    for (int k = 0; k < d; ++k) theta[1 + k] = rng.uniform(std::log(0.05), std::log(2.0));
    theta[d + 1] = rng.uniform(std::log(1e-5), std::log(1e-1));
    theta[d + 2] = rng.uniform(-1.0, 1.0);
    starts.push_back(theta);
  }
  starts.resize(std::max(options.restarts, 1));

  const ValueAndGradient objective = [&](const Vec& theta, Vec* grad) {
    return lml_with_gradient(U, ys, theta, grad);
  };
  Vec best_theta;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Vec& start : starts) {
    const BoxOptResult res = maximize_box_lbfgs(objective, start, lo, hi, options.max_iters);
    if (std::isfinite(res.value) && res.value > best_value) {
      best_value = res.value;
      best_theta = res.x;
    }
  }
  if (best_theta.size() == 0) {
    throw NumericalError("fit_gp: marginal likelihood could not be evaluated at any restart (n=" +
                         std::to_string(n) + ")");
  }
  return GPModel(domain, data, unpack(best_theta, d), y_mean, y_std);
}

Prediction posterior(const GPModel& gp, const Vec& x) {
  check_dim(x, gp.dim(), "posterior");
  const KernelParams& p = gp.params();
  const Vec u = gp.domain().to_unit(x);
  double mean_s = p.constant_mean;
  double var_s = p.outputscale;
  if (gp.size() > 0) {
    const Vec k = rbf_gram(gp.unit_inputs(), u.transpose(), p.outputscale, p.lengthscales).col(0);
    mean_s += k.dot(gp.alpha());
    const Vec v = gp.chol().triangularView<Eigen::Lower>().solve(k);
    var_s -= v.squaredNorm();
  }
  Prediction out;
  out.mean = gp.destandardize(mean_s);
  out.variance = std::max(var_s, 0.0) * gp.y_std() * gp.y_std();
  return out;
}

Vec posterior_mean(const GPModel& gp, const Mat& X) {
  if (X.cols() != gp.dim()) throw InputError("posterior_mean: dimension mismatch");
  const KernelParams& p = gp.params();
  Vec mean = Vec::Constant(X.rows(), p.constant_mean);
  if (gp.size() > 0) {
    const Mat K = rbf_gram(gp.domain().rows_to_unit(X), gp.unit_inputs(), p.outputscale, p.lengthscales);
    mean += K * gp.alpha();
  }
  return (gp.y_mean() + gp.y_std() * mean.array()).matrix();
}

Mat posterior_cov(const GPModel& gp, const Mat& X1, const Mat& X2) {
  if (X1.cols() != gp.dim() || X2.cols() != gp.dim()) {
    throw InputError("posterior_cov: dimension mismatch");
  }
  const KernelParams& p = gp.params();
  const Mat U1 = gp.domain().rows_to_unit(X1);
  const Mat U2 = gp.domain().rows_to_unit(X2);
  Mat C = rbf_gram(U1, U2, p.outputscale, p.lengthscales);
  const bool same = X1.rows() == X2.rows() && X1 == X2;
  if (gp.size() > 0) {
    const auto L = gp.chol().triangularView<Eigen::Lower>();
    const Mat V1 = L.solve(rbf_gram(gp.unit_inputs(), U1, p.outputscale, p.lengthscales));
    if (same) {
      C.noalias() -= V1.transpose() * V1;
    } else {
      const Mat V2 = L.solve(rbf_gram(gp.unit_inputs(), U2, p.outputscale, p.lengthscales));
      C.noalias() -= V1.transpose() * V2;
    }
  }
  if (same) C = 0.5 * (C + C.transpose()).eval();
  return C * (gp.y_std() * gp.y_std());
}

Mat sample_posterior(const GPModel& gp, const Mat& X, int count, std::uint64_t seed) {
  if (count < 0) throw InputError("sample_posterior: negative count");
  const Eigen::Index m = X.rows();
  if (count == 0 || m == 0) return Mat(count, m);
  const Vec mean = posterior_mean(gp, X);
  const CholeskyFactor f = robust_cholesky(posterior_cov(gp, X, X), "sample_posterior");
  Rng rng(seed);
  Mat Z(m, count);
  for (int r = 0; r < count; ++r) {
    for (Eigen::Index i = 0; i < m; ++i) Z(i, r) = rng.normal();
  }
  Mat draws = (f.lower.triangularView<Eigen::Lower>() * Z).transpose();
  draws.rowwise() += mean.transpose();
  return draws;
}

GPModel condition_on(const GPModel& gp, const Vec& x, double y) {
  check_dim(x, gp.dim(), "condition_on");
  Dataset data = gp.data();
  data.append(x, y);
  return GPModel(gp.domain(), std::move(data), gp.params(), gp.y_mean(), gp.y_std());
}

}  // namespace coexbo
