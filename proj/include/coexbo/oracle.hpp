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
#include "coexbo/expression.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coexbo {

/// Serializable description of an objective. Exactly one of `builtin` and
/// `expression` is set. When only `optimum_x` is given the optimum value is
/// filled in by evaluating the objective there.
struct ObjectiveDef {
  std::string name;
  int dim = 0;
  Vec lower;
  Vec upper;
  std::string builtin;
  std::string expression;
  std::optional<Vec> optimum_x;
  std::optional<double> optimum_value;
};

// Objectives are maximized. Builtins are sign-adjusted accordingly.
class Objective {
 public:
  explicit Objective(ObjectiveDef def);

  const std::string& name() const { return def_.name; }
  int dim() const { return def_.dim; }
  const Domain& domain() const { return domain_; }
  const ObjectiveDef& definition() const { return def_; }

  bool has_optimum() const { return def_.optimum_value.has_value(); }
  // Throws InputError when the optimum is unknown.
  double optimum_value() const;
  const std::optional<Vec>& optimum_x() const { return def_.optimum_x; }

  // Evaluates at x; x outside the domain is an InputError.
  double operator()(const Vec& x) const;

 private:
  double raw(const Vec& x) const;

  ObjectiveDef def_;
  Domain domain_;
  Expression expr_;
  int builtin_id_ = -1;
};

std::vector<std::string> builtin_objective_names();
std::vector<std::string> preset_objective_names();
ObjectiveDef builtin_definition(const std::string& name);
ObjectiveDef preset_definition(const std::string& name);

// Builtin or preset by name.
Objective make_objective(const std::string& name);

double eval_objective(const Objective& obj, const Vec& x);

// f(x) plus one N(0, noise_var) draw from the given seed.
double observe(const Objective& obj, const Vec& x, double noise_var, std::uint64_t seed);

// JSON object {name, dim, lower, upper, expression | builtin, optimum_x?, optimum_value?}.
std::string objective_to_json(const ObjectiveDef& def);
ObjectiveDef objective_def_from_json(const std::string& text);
Objective load_custom_objective(const std::string& json_text);

struct SyntheticHumanConfig {
  double sigma_pref_sq = 0.1;
  bool adversarial = false;

  void validate() const;
};

// The random inputs of one synthetic comparison: arm noises and a tie breaker.
struct HumanDraw {
  double e1 = 0.0;
  double e2 = 0.0;
  double tie_u = 0.0;
};

HumanDraw draw_human(double sigma_pref_sq, std::uint64_t seed);
// The draw that a comparison with the arms exchanged would see.
HumanDraw mirrored(const HumanDraw& d);
// 1 if arm one wins, 2 otherwise.
int select_with_draw(double f1, double f2, const HumanDraw& draw, bool adversarial);

int synthetic_select(const Objective& obj, const Vec& x1, const Vec& x2,
                     const SyntheticHumanConfig& cfg, std::uint64_t seed);

// Unassisted manual search: the best of `draws` uniform points under the
// noisy human utility (the worst, for an adversarial human).
Vec manual_design(const Objective& obj, const SyntheticHumanConfig& cfg, std::uint64_t seed,
                  int draws = 10);

}  // namespace coexbo
