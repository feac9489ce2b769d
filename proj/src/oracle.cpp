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

#include "coexbo/oracle.hpp"

#include "coexbo/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace coexbo {

namespace {

using json = nlohmann::json;

enum BuiltinId { kAckley, kHolderTable, kStyblinskiTang, kMichalewicz, kRosenbrock };

const char* const kBuiltinNames[] = {"ackley", "holder_table", "styblinski_tang", "michalewicz",
                                     "rosenbrock"};

int builtin_id(const std::string& name) {
  for (int i = 0; i < 5; ++i) {
    if (name == kBuiltinNames[i]) return i;
  }
  return -1;
}

double ackley(const Vec& x) {
  const double a = 20.0, b = 0.2, c = 2.0 * M_PI;
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cs = (c * x.array()).cos().sum() / d;
  return -(-a * std::exp(-b * std::sqrt(sq)) - std::exp(cs) + a + std::exp(1.0));
}

double holder_table(const Vec& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  return std::abs(std::sin(x[0]) * std::cos(x[1]) * std::exp(std::abs(1.0 - r / M_PI)));
}

double styblinski_tang(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v * v * v - 16.0 * v * v + 5.0 * v;
  return -0.5 * s;
}

double michalewicz(const Vec& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    s += std::sin(v) * std::pow(std::sin((i + 1) * v * v / M_PI), 20);
  }
  return s;
}

double rosenbrock(const Vec& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return -s;
}

Vec vec_of(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec json_vec(const json& j, const char* field) {
  if (!j.is_array()) throw InputError(std::string("objective: '") + field + "' must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InputError(std::string("objective: '") + field + "' must contain numbers");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

Objective::Objective(ObjectiveDef def) : def_(std::move(def)) {
  if (def_.name.empty()) throw InputError("objective: name is required");
  if (def_.dim < 1) throw InputError("objective: dim must be at least 1");
  if (def_.lower.size() != def_.dim || def_.upper.size() != def_.dim) {
    throw InputError("objective: lower/upper must have dim entries");
  }
  domain_ = Domain(def_.lower, def_.upper);
  const bool has_builtin = !def_.builtin.empty();
  const bool has_expr = !def_.expression.empty();
  if (has_builtin == has_expr) {
    throw InputError("objective: exactly one of 'builtin' and 'expression' must be given");
  }
  if (has_builtin) {
    builtin_id_ = builtin_id(def_.builtin);
    if (builtin_id_ < 0) throw InputError("objective: unknown builtin '" + def_.builtin + "'");
    if (builtin_id_ == kHolderTable && def_.dim != 2) {
      throw InputError("objective: holder_table is two-dimensional");
    }
  } else {
    expr_ = Expression::parse(def_.expression, def_.dim);
  }

  // Finite at the centre and, for small d, at every corner.
  std::vector<Vec> probes{domain_.center()};
  if (def_.dim <= 10) {
    for (int m = 0; m < (1 << def_.dim); ++m) {
      Vec c(def_.dim);
      for (int k = 0; k < def_.dim; ++k) c[k] = (m >> k) & 1 ? def_.upper[k] : def_.lower[k];
      probes.push_back(c);
    }
  }
  for (const Vec& p : probes) {
    if (!std::isfinite(raw(p))) {
      throw InputError("objective '" + def_.name + "' is not finite on its domain");
    }
  }

  if (def_.optimum_x) {
    if (def_.optimum_x->size() != def_.dim || !domain_.contains(*def_.optimum_x)) {
      throw InputError("objective: optimum_x must be a point of the domain");
    }
    const double at = raw(*def_.optimum_x);
    if (!def_.optimum_value) {
      def_.optimum_value = at;
    } else if (std::abs(*def_.optimum_value - at) > 1e-4) {
      throw InputError("objective: optimum_value disagrees with the objective at optimum_x");
    }
  }
}

double Objective::optimum_value() const {
  if (!def_.optimum_value) {
    throw InputError("objective '" + def_.name +
                     "' has no known optimum; report the best observed value instead of regret");
  }
  return *def_.optimum_value;
}

double Objective::raw(const Vec& x) const {
  switch (builtin_id_) {
    case kAckley:
      return ackley(x);
    case kHolderTable:
      return holder_table(x);
    case kStyblinskiTang:
      return styblinski_tang(x);
    case kMichalewicz:
      return michalewicz(x);
    case kRosenbrock:
      return rosenbrock(x);
    default:
      return expr_.eval(x);
  }
}

double Objective::operator()(const Vec& x) const {
  check_dim(x, def_.dim, "objective");
  if (!domain_.contains(x, 1e-9)) {
    throw InputError("objective '" + def_.name + "': point outside the domain");
  }
  return raw(x);
}

std::vector<std::string> builtin_objective_names() {
  return {std::begin(kBuiltinNames), std::end(kBuiltinNames)};
}

std::vector<std::string> preset_objective_names() { return {"gaussian_bump", "electrolyte"}; }

ObjectiveDef builtin_definition(const std::string& name) {
  ObjectiveDef d;
  d.name = name;
  d.builtin = name;
  switch (builtin_id(name)) {
    case kAckley:
      d.dim = 4;
      d.lower = Vec::Constant(4, -1.0);
      d.upper = Vec::Constant(4, 1.0);
      d.optimum_x = Vec::Zero(4);
      d.optimum_value = 0.0;
      break;
    case kHolderTable:
      // Refined location; the commonly quoted (8.05502, 9.66459) agrees to 5 digits.
      d.dim = 2;
      d.lower = Vec::Zero(2);
      d.upper = Vec::Constant(2, 10.0);
      d.optimum_x = vec_of({8.055023466339607, 9.664590027738118});
      d.optimum_value = 19.2085;
      break;
    case kStyblinskiTang:
      d.dim = 3;
      d.lower = Vec::Constant(3, -5.0);
      d.upper = Vec::Constant(3, 5.0);
      d.optimum_x = Vec::Constant(3, -2.903534);
      d.optimum_value = 39.166166 * 3;
      break;
    case kMichalewicz:
      // Separable: each coordinate maximizes its own term.
      d.dim = 5;
      d.lower = Vec::Zero(5);
      d.upper = Vec::Constant(5, M_PI);
      d.optimum_x = vec_of({2.202905519519730, 1.570796326794896, 1.284991570356546,
                            1.923058471656016, 1.720469772856545});
      d.optimum_value = 4.687658;
      break;
    case kRosenbrock:
      d.dim = 3;
      d.lower = Vec::Constant(3, -5.0);
      d.upper = Vec::Constant(3, 10.0);
      d.optimum_x = Vec::Ones(3);
      d.optimum_value = 0.0;
      break;
    default:
      throw InputError("unknown builtin objective '" + name + "'");
  }
  return d;
}

ObjectiveDef preset_definition(const std::string& name) {
  ObjectiveDef d;
  d.name = name;
  if (name == "gaussian_bump") {
    d.dim = 2;
    d.lower = Vec::Zero(2);
    d.upper = Vec::Ones(2);
    d.expression = "exp(-((x1 - 0.3)^2 + (x2 - 0.7)^2) / (2 * 0.1^2))";
    d.optimum_x = vec_of({0.3, 0.7});
  } else if (name == "electrolyte") {
    // Three anisotropic bumps over (salt, solvent ratio, additive); the
    // secondary modes are far enough apart that the main centre is the
    // optimum to within 1e-6.
    d.dim = 3;
    d.lower = Vec::Zero(3);
    d.upper = vec_of({2.0, 1.0, 1.0});
    d.expression =
        "12 * exp(-((x1 - 1.2)^2 / (2 * 0.25^2) + (x2 - 0.35)^2 / (2 * 0.12^2)"
        " + (x3 - 0.6)^2 / (2 * 0.15^2)))"
        " + 8.5 * exp(-((x1 - 0.45)^2 / (2 * 0.2^2) + (x2 - 0.75)^2 / (2 * 0.15^2)"
        " + (x3 - 0.3)^2 / (2 * 0.12^2)))"
        " + 6 * exp(-((x1 - 1.7)^2 / (2 * 0.15^2) + (x2 - 0.8)^2 / (2 * 0.1^2)"
        " + (x3 - 0.85)^2 / (2 * 0.1^2)))";
    d.optimum_x = vec_of({1.2, 0.35, 0.6});
  } else {
    throw InputError("unknown preset objective '" + name + "'");
  }
  return d;
}

Objective make_objective(const std::string& name) {
  if (builtin_id(name) >= 0) return Objective(builtin_definition(name));
  for (const std::string& p : preset_objective_names()) {
    if (p == name) return Objective(preset_definition(name));
  }
  throw InputError("unknown objective '" + name + "'");
}

double eval_objective(const Objective& obj, const Vec& x) { return obj(x); }

double observe(const Objective& obj, const Vec& x, double noise_var, std::uint64_t seed) {
  if (!(noise_var >= 0.0)) throw InputError("observe: noise_var must be nonnegative");
  const double f = obj(x);
  if (noise_var == 0.0) return f;
  Rng rng(seed);
  return f + std::sqrt(noise_var) * rng.normal();
}

std::string objective_to_json(const ObjectiveDef& def) {
  json j;
  j["name"] = def.name;
  j["dim"] = def.dim;
  j["lower"] = vec_json(def.lower);
  j["upper"] = vec_json(def.upper);
  if (!def.builtin.empty()) j["builtin"] = def.builtin;
  if (!def.expression.empty()) j["expression"] = def.expression;
  if (def.optimum_x) j["optimum_x"] = vec_json(*def.optimum_x);
  if (def.optimum_value) j["optimum_value"] = *def.optimum_value;
  return j.dump();
}

ObjectiveDef objective_def_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("objective: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("objective: expected a JSON object");
  ObjectiveDef d;
  try {
    d.name = j.at("name").get<std::string>();
    d.dim = j.at("dim").get<int>();
    d.lower = json_vec(j.at("lower"), "lower");
    d.upper = json_vec(j.at("upper"), "upper");
    if (j.contains("builtin")) d.builtin = j["builtin"].get<std::string>();
    if (j.contains("expression")) d.expression = j["expression"].get<std::string>();
    if (j.contains("optimum_x")) d.optimum_x = json_vec(j["optimum_x"], "optimum_x");
    if (j.contains("optimum_value")) d.optimum_value = j["optimum_value"].get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("objective: ") + e.what());
  }
  return d;
}

Objective load_custom_objective(const std::string& json_text) {
  return Objective(objective_def_from_json(json_text));
}

void SyntheticHumanConfig::validate() const {
  if (!(sigma_pref_sq >= 0.0) || !std::isfinite(sigma_pref_sq)) {
    throw InputError("sigma_pref_sq must be a finite nonnegative number");
  }
}

HumanDraw draw_human(double sigma_pref_sq, std::uint64_t seed) {
  Rng rng(seed);
  const double s = std::sqrt(sigma_pref_sq);
  HumanDraw d;
  d.e1 = s * rng.normal();
  d.e2 = s * rng.normal();
  d.tie_u = rng.uniform();
  return d;
}

HumanDraw mirrored(const HumanDraw& d) { return HumanDraw{d.e2, d.e1, 1.0 - d.tie_u}; }

int select_with_draw(double f1, double f2, const HumanDraw& draw, bool adversarial) {
  const double h1 = f1 + draw.e1;
  const double h2 = f2 + draw.e2;
  int choice;
  if (h1 > h2) {
    choice = 1;
  } else if (h2 > h1) {
    choice = 2;
  } else {
    choice = draw.tie_u < 0.5 ? 1 : 2;
  }
  return adversarial ? 3 - choice : choice;
}

int synthetic_select(const Objective& obj, const Vec& x1, const Vec& x2,
                     const SyntheticHumanConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return select_with_draw(obj(x1), obj(x2), draw_human(cfg.sigma_pref_sq, seed), cfg.adversarial);
}

Vec manual_design(const Objective& obj, const SyntheticHumanConfig& cfg, std::uint64_t seed,
                  int draws) {
  cfg.validate();
  if (draws < 1) throw InputError("manual_design: draws must be at least 1");
  Rng rng(seed);
  const double s = std::sqrt(cfg.sigma_pref_sq);
  Vec best;
  double best_h = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < draws; ++i) {
    const Vec x = rng.uniform_in(obj.domain());
    double h = obj(x) + s * rng.normal();
    if (cfg.adversarial) h = -h;
    if (h > best_h) {
      best_h = h;
      best = x;
    }
  }
  return best;
}

}  // namespace coexbo
