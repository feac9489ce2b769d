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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace coexbo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, out-of-range parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// Factorizations that fail even after jitter escalation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Operation invoked in the wrong session phase.
class StateError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Session file problems: truncated or corrupt JSON, unknown schema versions.
class SessionFileError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box [lower, upper] in R^d.
class Domain {
 public:
  Domain() = default;
  Domain(Vec lower, Vec upper);

  static Domain unit(int dim);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  Vec width() const { return upper_ - lower_; }
  Vec center() const { return 0.5 * (lower_ + upper_); }

  bool contains(const Vec& x, double tol = 1e-12) const;
  Vec clip(const Vec& x) const;

  // Affine maps between the box and [0, 1]^d.
  Vec to_unit(const Vec& x) const;
  Vec from_unit(const Vec& u) const;
  Mat rows_to_unit(const Mat& X) const;
  Mat rows_from_unit(const Mat& U) const;

  bool operator==(const Domain& other) const {
    return lower_ == other.lower_ && upper_ == other.upper_;
  }

 private:
  Vec lower_;
  Vec upper_;
};

struct Dataset {
  Mat X;  // n x d
  Vec y;  // n

  int size() const { return static_cast<int>(y.size()); }
  int dim() const { return static_cast<int>(X.cols()); }
  void validate(const Domain& domain) const;
  void append(const Vec& x, double value);
};

void check_dim(const Vec& x, int dim, const char* what);

}  // namespace coexbo
