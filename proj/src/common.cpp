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

#include "coexbo/common.hpp"

#include <string>

namespace coexbo {

Domain::Domain(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1) throw InputError("Domain: dimension must be at least 1");
  if (lower_.size() != upper_.size()) {
    throw InputError("Domain: lower and upper bounds differ in length");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw InputError("Domain: lower[" + std::to_string(i) + "] must be < upper[" +
                       std::to_string(i) + "]");
    }
  }
}

Domain Domain::unit(int dim) { return Domain(Vec::Zero(dim), Vec::Ones(dim)); }

bool Domain::contains(const Vec& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double slack = tol * (upper_[i] - lower_[i]);
    if (!(x[i] >= lower_[i] - slack && x[i] <= upper_[i] + slack)) return false;
  }
  return true;
}

Vec Domain::clip(const Vec& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

Vec Domain::to_unit(const Vec& x) const {
  check_dim(x, dim(), "Domain::to_unit");
  return (x - lower_).cwiseQuotient(upper_ - lower_);
}

Vec Domain::from_unit(const Vec& u) const {
  check_dim(u, dim(), "Domain::from_unit");
  return lower_ + u.cwiseProduct(upper_ - lower_);
}

Mat Domain::rows_to_unit(const Mat& X) const {
  if (X.cols() != dim()) throw InputError("Domain::rows_to_unit: column count mismatch");
  Mat U(X.rows(), X.cols());
  const Vec w = width();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    U.row(i) = (X.row(i).transpose() - lower_).cwiseQuotient(w).transpose();
  }
  return U;
}

Mat Domain::rows_from_unit(const Mat& U) const {
  if (U.cols() != dim()) throw InputError("Domain::rows_from_unit: column count mismatch");
  Mat X(U.rows(), U.cols());
  const Vec w = width();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    X.row(i) = (lower_ + U.row(i).transpose().cwiseProduct(w)).transpose();
  }
  return X;
}

void Dataset::validate(const Domain& domain) const {
  if (X.rows() != y.size()) {
    throw InputError("Dataset: row count of X (" + std::to_string(X.rows()) +
                     ") differs from length of y (" + std::to_string(y.size()) + ")");
  }
  if (X.rows() > 0 && X.cols() != domain.dim()) {
    throw InputError("Dataset: input dimension does not match domain");
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (!domain.contains(X.row(i).transpose(), 1e-9)) {
      throw InputError("Dataset: row " + std::to_string(i) + " lies outside the domain");
    }
  }
  if (!y.allFinite()) throw InputError("Dataset: non-finite observation");
}

void Dataset::append(const Vec& x, double value) {
  if (X.rows() > 0 && x.size() != X.cols()) throw InputError("Dataset::append: dimension mismatch");
  if (X.rows() == 0) X.resize(0, x.size());
  X.conservativeResize(X.rows() + 1, x.size());
  X.row(X.rows() - 1) = x.transpose();
  y.conservativeResize(y.size() + 1);
  y[y.size() - 1] = value;
}

void check_dim(const Vec& x, int dim, const char* what) {
  if (x.size() != dim) {
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(dim) + ", got " +
                     std::to_string(x.size()));
  }
}

}  // namespace coexbo
