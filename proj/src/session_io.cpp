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

#include "json_codec.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace coexbo {

namespace codec {

json vec(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vec(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + ": expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json mat(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

Mat mat(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected an array of rows");
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = vec(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw InputError(std::string(what) + ": rows have different lengths");
    }
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

json objective(const ObjectiveDef& d) { return json::parse(objective_to_json(d)); }

ObjectiveDef objective(const json& j) { return objective_def_from_json(j.dump()); }

namespace {

const char* const kConfigFields[] = {"objective", "n_obj",        "n_pref",   "T",
                                     "beta_sqrt", "gamma",        "gamma_pibo", "noise_var",
                                     "human",     "baseline",     "seed",     "alpha_eps",
                                     "n_mc",      "rho_convention", "explain", "record_timing"};

json attribution(const ShapleyAttribution& a) { return {{"phi", vec(a.phi)}, {"base", a.base}}; }

ShapleyAttribution attribution(const json& j, ShapleyTarget t) {
  ShapleyAttribution a;
  a.phi = vec(j.at("phi"), "phi");
  a.base = j.at("base").get<double>();
  a.target = t;
  return a;
}

}  // namespace

json config(const SessionConfig& c) {
  json j;
  j["objective"] = objective(c.objective);
  j["n_obj"] = c.n_obj;
  j["n_pref"] = c.n_pref;
  j["T"] = c.T;
  j["beta_sqrt"] = c.beta_sqrt;
  j["gamma"] = c.gamma;
  j["gamma_pibo"] = c.gamma_pibo;
  j["noise_var"] = c.noise_var;
  j["human"] = {{"source", c.human == HumanSource::synthetic ? "synthetic" : "interactive"},
                {"sigma_pref_sq", c.synthetic.sigma_pref_sq},
                {"adversarial", c.synthetic.adversarial}};
  j["baseline"] = to_string(c.baseline);
  j["seed"] = c.seed;
  j["alpha_eps"] = c.alpha_eps;
  j["n_mc"] = c.n_mc;
  j["rho_convention"] = to_string(c.rho);
  j["explain"] = c.explain;
  j["record_timing"] = c.record_timing;
  return j;
}

SessionConfig config(const json& j) {
  std::vector<FieldError> errs;
  SessionConfig c;
  if (!j.is_object()) throw ConfigError(std::vector<FieldError>{{"", "expected a JSON object"}});
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* f : kConfigFields) known = known || key == f;
    if (!known) errs.push_back({key, "unknown field"});
  }
  auto get = [&](const char* field, auto& target) {
    if (!j.contains(field)) return;
    try {
      target = j.at(field).get<std::decay_t<decltype(target)>>();
    } catch (const json::exception&) {
      errs.push_back({field, "wrong type"});
    }
  };
  auto get_int = [&](const char* field, int& target) {
    if (!j.contains(field)) return;
    if (!j[field].is_number_integer()) {
      errs.push_back({field, "must be an integer"});
      return;
    }
    target = j[field].get<int>();
  };
  auto get_double = [&](const char* field, double& target) {
    if (!j.contains(field)) return;
    if (!j[field].is_number()) {
      errs.push_back({field, "must be a number"});
      return;
    }
    target = j[field].get<double>();
  };

  if (j.contains("objective")) {
    const json& o = j["objective"];
    try {
      if (o.is_string()) {
        const std::string name = o.get<std::string>();
        c.objective = make_objective(name).definition();
      } else {
        c.objective = objective(o);
      }
    } catch (const Error& e) {
      errs.push_back({"objective", e.what()});
    }
  }
  get_int("n_obj", c.n_obj);
  get_int("n_pref", c.n_pref);
  get_int("T", c.T);
  get_double("beta_sqrt", c.beta_sqrt);
  get_double("gamma", c.gamma);
  get_double("gamma_pibo", c.gamma_pibo);
  get_double("noise_var", c.noise_var);
  get_double("alpha_eps", c.alpha_eps);
  get_int("n_mc", c.n_mc);
  get("explain", c.explain);
  get("record_timing", c.record_timing);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      errs.push_back({"seed", "must be a nonnegative integer"});
    } else {
      c.seed = j["seed"].get<std::uint64_t>();
    }
  }
  if (j.contains("baseline")) {
    try {
      c.baseline = baseline_from_string(j["baseline"].get<std::string>());
    } catch (const std::exception& e) {
      errs.push_back({"baseline", e.what()});
    }
  }
  if (j.contains("rho_convention")) {
    try {
      c.rho = rho_convention_from_string(j["rho_convention"].get<std::string>());
    } catch (const std::exception& e) {
      errs.push_back({"rho_convention", e.what()});
    }
  }
  if (j.contains("human")) {
    const json& h = j["human"];
    if (!h.is_object()) {
      errs.push_back({"human", "expected an object"});
    } else {
      for (const auto& [key, value] : h.items()) {
        if (key != "source" && key != "sigma_pref_sq" && key != "adversarial") {
          errs.push_back({"human." + key, "unknown field"});
        }
      }
      if (h.contains("source")) {
        const json& s = h["source"];
        if (s == "synthetic") {
          c.human = HumanSource::synthetic;
        } else if (s == "interactive") {
          c.human = HumanSource::interactive;
        } else {
          errs.push_back({"human.source", "must be 'synthetic' or 'interactive'"});
        }
      }
      if (h.contains("sigma_pref_sq")) {
        if (h["sigma_pref_sq"].is_number()) {
          c.synthetic.sigma_pref_sq = h["sigma_pref_sq"].get<double>();
        } else {
          errs.push_back({"human.sigma_pref_sq", "must be a number"});
        }
      }
      if (h.contains("adversarial")) {
        if (h["adversarial"].is_boolean()) {
          c.synthetic.adversarial = h["adversarial"].get<bool>();
        } else {
          errs.push_back({"human.adversarial", "must be a boolean"});
        }
      }
    }
  }
  if (errs.empty()) {
    errs = c.check();
  } else {
    // Report range problems on the fields that did parse as well.
    for (FieldError& e : c.check()) {
      bool dup = false;
      for (const FieldError& o : errs) dup = dup || o.field == e.field;
      if (!dup) errs.push_back(std::move(e));
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

json feedback(const SelectionFeedback& f) {
  return {{"prob_mean", f.prob_mean}, {"prob_var", f.prob_var}};
}

json bundle(const ExplanationBundle& b) {
  json j;
  json cands = json::array();
  for (const CandidateExplanation& c : b.candidates) {
    cands.push_back({{"x", vec(c.x)},
                     {"shapley",
                      {{"af", attribution(c.shapley.af)},
                       {"mean", attribution(c.shapley.mean)},
                       {"std", attribution(c.shapley.std)}}}});
  }
  j["candidates"] = cands;
  j["top2"] = b.top2;
  j["rect"] = {{"lo", vec(b.rect.lo)}, {"hi", vec(b.rect.hi)}};
  if (b.gp_mean.size() > 0) {
    j["heatmaps"] = {{"rows", b.gp_mean.rows()},
                     {"cols", b.gp_mean.cols()},
                     {"gp_mean", mat(b.gp_mean)},
                     {"gp_std", mat(b.gp_std)},
                     {"belief", b.belief.size() > 0 ? mat(b.belief) : json(nullptr)}};
  } else {
    j["heatmaps"] = nullptr;
  }
  j["feedback"] = b.feedback ? feedback(*b.feedback) : json(nullptr);
  return j;
}

ExplanationBundle bundle(const json& j) {
  ExplanationBundle b;
  for (const json& c : j.at("candidates")) {
    CandidateExplanation ce;
    ce.x = vec(c.at("x"), "x");
    const json& s = c.at("shapley");
    ce.shapley.af = attribution(s.at("af"), ShapleyTarget::af);
    ce.shapley.mean = attribution(s.at("mean"), ShapleyTarget::mean);
    ce.shapley.std = attribution(s.at("std"), ShapleyTarget::std);
    b.candidates.push_back(std::move(ce));
  }
  b.top2 = j.at("top2").get<std::vector<int>>();
  b.rect.lo = vec(j.at("rect").at("lo"), "rect.lo");
  b.rect.hi = vec(j.at("rect").at("hi"), "rect.hi");
  const json& h = j.at("heatmaps");
  if (!h.is_null()) {
    b.gp_mean = mat(h.at("gp_mean"), "gp_mean");
    b.gp_std = mat(h.at("gp_std"), "gp_std");
    if (!h.at("belief").is_null()) b.belief = mat(h.at("belief"), "belief");
  }
  const json& f = j.at("feedback");
  if (!f.is_null()) {
    b.feedback = SelectionFeedback{f.at("prob_mean").get<double>(), f.at("prob_var").get<double>()};
  }
  return b;
}

json record(const IterationRecord& r) {
  json j;
  j["t"] = r.t;
  j["x1"] = vec(r.x1);
  j["x2"] = vec(r.x2);
  j["choice"] = r.choice;
  j["y"] = r.y;
  j["f_true"] = r.f_true;
  j["regret"] = r.regret ? json(*r.regret) : json(nullptr);
  j["selection_correct"] = r.selection_correct ? json(*r.selection_correct) : json(nullptr);
  j["feedback"] = feedback(r.feedback);
  j["gen_ms"] = r.gen_ms;
  j["human_ms"] = r.human_ms;
  j["explanation"] = r.explanation ? bundle(*r.explanation) : json(nullptr);
  return j;
}

IterationRecord record(const json& j) {
  IterationRecord r;
  r.t = j.at("t").get<int>();
  r.x1 = vec(j.at("x1"), "x1");
  r.x2 = vec(j.at("x2"), "x2");
  r.choice = j.at("choice").get<int>();
  r.y = j.at("y").get<double>();
  r.f_true = j.at("f_true").get<double>();
  if (!j.at("regret").is_null()) r.regret = j["regret"].get<double>();
  if (!j.at("selection_correct").is_null()) r.selection_correct = j["selection_correct"].get<bool>();
  r.feedback.prob_mean = j.at("feedback").at("prob_mean").get<double>();
  r.feedback.prob_var = j.at("feedback").at("prob_var").get<double>();
  r.gen_ms = j.at("gen_ms").get<double>();
  r.human_ms = j.at("human_ms").get<double>();
  if (!j.at("explanation").is_null()) r.explanation = bundle(j["explanation"]);
  return r;
}

}  // namespace codec

using codec::json;

namespace {

json bq_params(const BQParams& p) {
  return {{"outputscale", p.outputscale}, {"lengthscale", p.lengthscale}, {"noise", p.noise}};
}

BQParams bq_params(const json& j) {
  return BQParams{j.at("outputscale").get<double>(), j.at("lengthscale").get<double>(),
                  j.at("noise").get<double>()};
}

// Schema 1 kept timings in a nested object, called the iteration counter
// "iteration" and had no belief-scaling or Dirichlet settings (they were
// fixed at the values that are now the defaults of those fields).
json migrate_v1(json j) {
  j["t"] = j.at("iteration");
  j.erase("iteration");
  json& cfg = j.at("config");
  if (!cfg.contains("rho_convention")) cfg["rho_convention"] = to_string(RhoConvention::swapped);
  if (!cfg.contains("alpha_eps")) cfg["alpha_eps"] = 0.01;
  for (json& r : j.at("history")) {
    const json timing = r.at("timing");
    r["gen_ms"] = timing.at("gen_ms");
    r["human_ms"] = timing.at("human_ms");
    r.erase("timing");
  }
  j["schema_version"] = 2;
  return j;
}

}  // namespace

struct SessionCodec {
  static json encode(const Session& s) {
    json j;
    j["schema_version"] = kSessionSchemaVersion;
    j["config"] = codec::config(s.cfg_);
    j["t"] = s.t_;
    j["phase"] = to_string(s.phase_);
    j["data"] = {{"X", codec::mat(s.data_.X)}, {"y", codec::vec(s.data_.y)},
                 {"f_true", codec::vec(s.f_true_)}};
    json duels = json::array();
    for (const DuelRecord& d : s.duels_) {
      duels.push_back({{"x1", codec::vec(d.x1)}, {"x2", codec::vec(d.x2)}, {"y_pref", d.y_pref}});
    }
    j["duels"] = duels;
    const KernelParams& kp = s.gp_->params();
    json models;
    models["gp"] = {{"outputscale", kp.outputscale}, {"lengthscales", codec::vec(kp.lengthscales)},
                    {"noise", kp.noise},             {"constant_mean", kp.constant_mean},
                    {"y_mean", s.gp_->y_mean()},     {"y_std", s.gp_->y_std()}};
    if (s.pref_) {
      const PrefParams& pp = s.pref_->params();
      // The model's duels are the session duels at the time of the last fit.
      models["preference"] = {{"outputscale", pp.outputscale},
                              {"lengthscales", codec::vec(pp.lengthscales)},
                              {"constant_mean", pp.constant_mean},
                              {"n_duels", s.pref_->duels().size()}};
    } else {
      models["preference"] = nullptr;
    }
    if (s.belief_) {
      const SoftCopeland& b = *s.belief_;
      models["belief"] = {{"nodes", codec::mat(b.nodes())},
                          {"mean_targets", codec::vec(b.mean_targets())},
                          {"var_targets", codec::vec(b.var_targets())},
                          {"mean_params", bq_params(b.mean_params())},
                          {"var_params", bq_params(b.var_params())}};
    } else {
      models["belief"] = nullptr;
    }
    j["models"] = models;
    json hist = json::array();
    for (const IterationRecord& r : s.history_) hist.push_back(codec::record(r));
    j["history"] = hist;
    if (s.pending_) {
      const PendingPair& p = *s.pending_;
      j["pending"] = {{"x1", codec::vec(p.x1)},
                      {"x2", codec::vec(p.x2)},
                      {"bundle", p.bundle ? codec::bundle(*p.bundle) : json(nullptr)},
                      {"gen_ms", p.gen_ms},
                      {"served_at_ms", p.served_at_ms}};
    } else {
      j["pending"] = nullptr;
    }
    return j;
  }

  static Session decode(const json& j) {
    SessionConfig cfg = codec::config(j.at("config"));
    Objective obj(cfg.objective);
    Session s(std::move(cfg), std::move(obj));
    s.t_ = j.at("t").get<int>();
    const std::string phase = j.at("phase").get<std::string>();
    if (phase == "ready") {
      s.phase_ = Phase::ready;
    } else if (phase == "awaiting_choice") {
      s.phase_ = Phase::awaiting_choice;
    } else {
      throw SessionFileError("unknown phase '" + phase + "'");
    }
    const json& data = j.at("data");
    s.data_.X = codec::mat(data.at("X"), "data.X");
    s.data_.y = codec::vec(data.at("y"), "data.y");
    s.f_true_ = codec::vec(data.at("f_true"), "data.f_true");
    for (const json& d : j.at("duels")) {
      s.duels_.push_back({codec::vec(d.at("x1"), "x1"), codec::vec(d.at("x2"), "x2"),
                          d.at("y_pref").get<int>()});
    }
    const Domain& dom = s.objective_.domain();
    const json& m = j.at("models");
    const json& g = m.at("gp");
    KernelParams kp;
    kp.outputscale = g.at("outputscale").get<double>();
    kp.lengthscales = codec::vec(g.at("lengthscales"), "lengthscales");
    kp.noise = g.at("noise").get<double>();
    kp.constant_mean = g.at("constant_mean").get<double>();
    s.gp_ = GPModel(dom, s.data_, kp, g.at("y_mean").get<double>(), g.at("y_std").get<double>());
    if (!m.at("preference").is_null()) {
      const json& p = m["preference"];
      PrefParams pp;
      pp.outputscale = p.at("outputscale").get<double>();
      pp.lengthscales = codec::vec(p.at("lengthscales"), "lengthscales");
      pp.constant_mean = p.at("constant_mean").get<double>();
      const std::size_t n = p.at("n_duels").get<std::size_t>();
      if (n > s.duels_.size()) throw SessionFileError("preference model refers to missing duels");
      std::vector<DuelRecord> used(s.duels_.begin(), s.duels_.begin() + static_cast<long>(n));
      s.pref_ = PreferenceGP(dom, std::move(used), s.cfg_.alpha_eps, pp);
    }
    if (!m.at("belief").is_null()) {
      const json& b = m["belief"];
      s.belief_ = SoftCopeland(dom, codec::mat(b.at("nodes"), "nodes"),
                               codec::vec(b.at("mean_targets"), "mean_targets"),
                               codec::vec(b.at("var_targets"), "var_targets"),
                               bq_params(b.at("mean_params")), bq_params(b.at("var_params")));
    }
    for (const json& r : j.at("history")) s.history_.push_back(codec::record(r));
    if (!j.at("pending").is_null()) {
      const json& p = j["pending"];
      PendingPair pp;
      pp.x1 = codec::vec(p.at("x1"), "x1");
      pp.x2 = codec::vec(p.at("x2"), "x2");
      if (!p.at("bundle").is_null()) pp.bundle = codec::bundle(p["bundle"]);
      pp.gen_ms = p.at("gen_ms").get<double>();
      pp.served_at_ms = p.at("served_at_ms").get<std::int64_t>();
      s.pending_ = std::move(pp);
    }
    if ((s.phase_ == Phase::awaiting_choice) != s.pending_.has_value()) {
      throw SessionFileError("phase and pending pair disagree");
    }
    if (s.data_.size() != s.cfg_.n_obj + s.t_ - 1 || s.f_true_.size() != s.data_.size()) {
      throw SessionFileError("observation count does not match t");
    }
    return s;
  }
};

std::string session_to_json(const Session& s) { return SessionCodec::encode(s).dump(); }

Session session_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SessionFileError(std::string("corrupt session file: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("schema_version")) {
      throw SessionFileError("not a session file: missing schema_version");
    }
    const int version = j.at("schema_version").get<int>();
    if (version == 1) {
      j = migrate_v1(std::move(j));
    } else if (version != kSessionSchemaVersion) {
      throw SessionFileError("unsupported session schema version " + std::to_string(version) +
                             " (this build reads 1 and " + std::to_string(kSessionSchemaVersion) +
                             ")");
    }
    return SessionCodec::decode(j);
  } catch (const SessionFileError&) {
    throw;
  } catch (const json::exception& e) {
    throw SessionFileError(std::string("malformed session file: ") + e.what());
  } catch (const Error& e) {
    throw SessionFileError(std::string("invalid session file: ") + e.what());
  }
}

void save_session(const Session& s, const std::string& path) {
  const std::string text = session_to_json(s);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << text;
    out.flush();
    if (!out) throw Error("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp + " into place: " + ec.message());
}

Session load_session(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SessionFileError("cannot open session file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return session_from_json(ss.str());
}

std::string config_to_json(const SessionConfig& cfg) { return codec::config(cfg).dump(); }

SessionConfig config_from_json(const std::string& text) {
  codec::json j;
  try {
    j = codec::json::parse(text);
  } catch (const codec::json::parse_error& e) {
    throw ConfigError(std::vector<FieldError>{{"", std::string("invalid JSON: ") + e.what()}});
  }
  return codec::config(j);
}

std::string bundle_to_json(const ExplanationBundle& b) { return codec::bundle(b).dump(); }

}  // namespace coexbo
