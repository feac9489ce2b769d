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

#include <string>
#include <vector>

namespace coexbo {

// Malformed expression text. `column` is the zero-based offset of the
// offending character.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t column);
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Arithmetic expression over the variables x1..xd.
///
/// Grammar: numbers, x1..xd, the constants pi and e, binary + - * / and a
/// right-associative ^, unary minus, parentheses, and the one-argument
/// functions exp, log, sqrt, sin, cos, tanh, abs. The text is compiled once to
/// a postfix program.
class Expression {
 public:
  Expression() = default;
  static Expression parse(const std::string& source, int dim);

  double eval(const Vec& x) const;
  const std::string& source() const { return source_; }
  int dim() const { return dim_; }

  enum class Op : unsigned char {
    constant, variable, add, sub, mul, div, pow, neg,
    exp, log, sqrt, sin, cos, tanh, abs,
  };
  struct Instr {
    Op op;
    int index = 0;       // variable index
    double value = 0.0;  // constant
  };

 private:
  std::string source_;
  int dim_ = 0;
  std::vector<Instr> program_;
  int max_depth_ = 0;

};

}  // namespace coexbo
