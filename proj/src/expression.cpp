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

#include "coexbo/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace coexbo {

ParseError::ParseError(const std::string& message, std::size_t column)
    : InputError("parse error at column " + std::to_string(column) + ": " + message),
      column_(column) {}

class ExpressionParser {
 public:
  ExpressionParser(const std::string& src, int dim) : s_(src), dim_(dim) {}

  std::vector<Expression::Instr> run() {
    skip();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void emit(Op op) { out_.push_back({op}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  // -a^b parses as -(a^b); the exponent may itself carry a sign.
  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::pow);
    }
  }

  void primary() {
    skip();
    if (pos_ == s_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      identifier();
      return;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  void number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == s_.data() + pos_) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    out_.push_back({Op::constant, 0, v});
  }

  void identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "pi") {
      out_.push_back({Op::constant, 0, M_PI});
      return;
    }
    if (name == "e") {
      out_.push_back({Op::constant, 0, M_E});
      return;
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::stoi(name.substr(1));
      if (k < 1 || k > dim_) {
        throw ParseError("variable " + name + " outside x1..x" + std::to_string(dim_), start);
      }
      out_.push_back({Op::variable, k - 1, 0.0});
      return;
    }
    static const std::pair<const char*, Op> functions[] = {
        {"exp", Op::exp}, {"log", Op::log},   {"sqrt", Op::sqrt}, {"sin", Op::sin},
        {"cos", Op::cos}, {"tanh", Op::tanh}, {"abs", Op::abs},
    };
    for (const auto& [fname, op] : functions) {
      if (name == fname) {
        if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
        expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        emit(op);
        return;
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr> out_;
};

Expression Expression::parse(const std::string& source, int dim) {
  if (dim < 1) throw InputError("expression dimension must be at least 1");
  Expression e;
  e.source_ = source;
  e.dim_ = dim;
  e.program_ = ExpressionParser(source, dim).run();
  int depth = 0;
  for (const Instr& in : e.program_) {
    switch (in.op) {
      case Op::constant:
      case Op::variable:
        ++depth;
        break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::pow:
        --depth;
        break;
      default:
        break;
    }
    e.max_depth_ = std::max(e.max_depth_, depth);
  }
  return e;
}

double Expression::eval(const Vec& x) const {
  if (program_.empty()) throw StateError("evaluating an empty expression");
  check_dim(x, dim_, "Expression::eval");
  std::vector<double> st(static_cast<std::size_t>(max_depth_));
  std::size_t top = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::constant:
        st[top++] = in.value;
        break;
      case Op::variable:
        st[top++] = x[in.index];
        break;
      case Op::add:
        --top;
        st[top - 1] += st[top];
        break;
      case Op::sub:
        --top;
        st[top - 1] -= st[top];
        break;
      case Op::mul:
        --top;
        st[top - 1] *= st[top];
        break;
      case Op::div:
        --top;
        st[top - 1] /= st[top];
        break;
      case Op::pow:
        --top;
        st[top - 1] = std::pow(st[top - 1], st[top]);
        break;
      case Op::neg:
        st[top - 1] = -st[top - 1];
        break;
      case Op::exp:
        st[top - 1] = std::exp(st[top - 1]);
        break;
      case Op::log:
        st[top - 1] = std::log(st[top - 1]);
        break;
      case Op::sqrt:
        st[top - 1] = std::sqrt(st[top - 1]);
        break;
      case Op::sin:
        st[top - 1] = std::sin(st[top - 1]);
        break;
      case Op::cos:
        st[top - 1] = std::cos(st[top - 1]);
        break;
      case Op::tanh:
        st[top - 1] = std::tanh(st[top - 1]);
        break;
      case Op::abs:
        st[top - 1] = std::abs(st[top - 1]);
        break;
    }
  }
  return st[0];
}

}  // namespace coexbo
