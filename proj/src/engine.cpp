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

#include "coexbo/engine.hpp"

#include "coexbo/random.hpp"
#include "coexbo/sobol.hpp"

#include <chrono>
#include <cmath>
#include <utility>

namespace coexbo {

namespace {

const std::pair<Baseline, const char*> kBaselineNames[] = {
    {Baseline::random, "random"},
    {Baseline::manual, "manual"},
    {Baseline::ucb, "ucb"},
    {Baseline::ts, "ts"},
    {Baseline::prior_sampling, "prior_sampling"},
    {Baseline::batch_ucb, "batch_ucb"},
    {Baseline::batch_ts, "batch_ts"},
    {Baseline::pibo, "pibo"},
    {Baseline::coexbo_pibo, "coexbo_pibo"},
    {Baseline::coexbo, "coexbo"},
};

// Restarts for refits after the first iteration. The first restart is warm
// started from the previous fit, so one or two extra starts suffice.
constexpr int kGpRefitRestarts = 3;
constexpr int kPrefRefitRestarts = 1;
constexpr int kBqRefitRestarts = 1;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::int64_t epoch_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string to_string(Baseline b) {
  for (const auto& [k, name] : kBaselineNames) {
    if (k == b) return name;
  }
  return "unknown";
}

Baseline baseline_from_string(const std::string& s) {
  for (const auto& [k, name] : kBaselineNames) {
    if (s == name) return k;
  }
  throw InputError("unknown baseline '" + s + "'");
}

std::vector<Baseline> all_baselines() {
  std::vector<Baseline> out;
  for (const auto& [k, name] : kBaselineNames) out.push_back(k);
  return out;
}

bool uses_belief(Baseline b) {
  return b == Baseline::prior_sampling || b == Baseline::pibo || b == Baseline::coexbo_pibo ||
         b == Baseline::coexbo;
}

bool learns_preferences(Baseline b) { return b == Baseline::coexbo_pibo || b == Baseline::coexbo; }

bool shows_pair(Baseline b) {
  return b == Baseline::random || b == Baseline::batch_ucb || b == Baseline::batch_ts ||
         b == Baseline::coexbo_pibo || b == Baseline::coexbo;
}

std::string to_string(Phase p) { return p == Phase::ready ? "ready" : "awaiting_choice"; }

static std::string join_errors(const std::vector<FieldError>& errors) {
  std::string msg = "invalid session config:";
  for (const FieldError& e : errors) msg += " " + e.field + ": " + e.message + ";";
  return msg;
}

ConfigError::ConfigError(std::vector<FieldError> errors)
    : InputError(join_errors(errors)), errors_(std::move(errors)) {}

std::vector<FieldError> SessionConfig::check() const {
  std::vector<FieldError> errs;
  auto need = [&](bool ok, const char* field, const char* msg) {
    if (!ok) errs.push_back({field, msg});
  };
  need(n_obj >= 2, "n_obj", "must be at least 2");
  need(n_pref >= 2, "n_pref", "must be at least 2");
  need(T >= 1, "T", "must be at least 1");
  need(std::isfinite(beta_sqrt) && beta_sqrt >= 0.0, "beta_sqrt", "must be finite and nonnegative");
  need(std::isfinite(gamma) && gamma > 0.0, "gamma", "must be positive");
  need(std::isfinite(gamma_pibo) && gamma_pibo > 0.0, "gamma_pibo", "must be positive");
  need(std::isfinite(noise_var) && noise_var >= 0.0, "noise_var", "must be nonnegative");
  need(std::isfinite(synthetic.sigma_pref_sq) && synthetic.sigma_pref_sq >= 0.0,
       "human.sigma_pref_sq", "must be nonnegative");
  need(alpha_eps > 0.0 && std::isfinite(alpha_eps), "alpha_eps", "must be positive");
  need(n_mc >= 2, "n_mc", "must be at least 2");
  try {
    const Objective obj(objective);
    need(obj.dim() <= kMaxShapleyDim, "objective", "at most 16 dimensions are supported");
  } catch (const Error& e) {
    errs.push_back({"objective", e.what()});
  }
  return errs;
}

void SessionConfig::validate() const {
  std::vector<FieldError> errs = check();
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

Session::Session(SessionConfig cfg, Objective obj)
    : cfg_(std::move(cfg)), objective_(std::move(obj)) {}

Session Session::init(SessionConfig cfg) {
  cfg.validate();
  Objective obj(cfg.objective);
  Session s(std::move(cfg), std::move(obj));
  const SessionConfig& c = s.cfg_;
  const Domain& dom = s.objective_.domain();
  const int d = dom.dim();

  const Mat X = dom.rows_from_unit(sobol_points(c.n_obj, d, derive_seed(c.seed, Stream::init_design)));
  s.data_.X.resize(0, d);
  s.f_true_.resize(0);
  for (int i = 0; i < c.n_obj; ++i) {
    const Vec x = X.row(i).transpose();
    const double f = s.objective_(x);
    s.data_.append(x, observe(s.objective_, x, c.noise_var, derive_seed(c.seed, Stream::init_observe, i)));
    s.f_true_.conservativeResize(i + 1);
    s.f_true_[i] = f;
  }

  Rng rng(derive_seed(c.seed, Stream::init_duels));
  for (int i = 0; i < c.n_pref; ++i) {
    const Vec a = rng.uniform_in(dom);
    const Vec b = rng.uniform_in(dom);
    const int choice = synthetic_select(s.objective_, a, b, c.synthetic,
                                        derive_seed(c.seed, Stream::init_human, i));
    s.duels_.push_back({a, b, choice == 1 ? 1 : 0});
  }

  s.fit_objective_model(true);
  if (uses_belief(c.baseline)) s.fit_preference_model(true);
  return s;
}

void Session::fit_objective_model(bool initial) {
  GPFitOptions opt;
  if (!initial && gp_) {
    opt.warm_start = gp_->params();
    opt.restarts = kGpRefitRestarts;
  }
  gp_ = fit_gp(data_, objective_.domain(), derive_seed(cfg_.seed, Stream::gp_fit, t_), opt);
}

void Session::fit_preference_model(bool initial) {
  PrefFitOptions popt;
  BQFitOptions bopt;
  if (!initial && pref_) {
    popt.warm_start = pref_->params();
    popt.restarts = kPrefRefitRestarts;
  }
  if (!initial && belief_) {
    bopt.warm_mean = belief_->mean_params();
    bopt.warm_var = belief_->var_params();
    bopt.restarts = kBqRefitRestarts;
  }
  pref_ = fit_preference_gp(duels_, objective_.domain(), cfg_.alpha_eps,
                            derive_seed(cfg_.seed, Stream::pref_fit, t_), popt);
  belief_ = build_soft_copeland(*pref_, cfg_.n_mc, derive_seed(cfg_.seed, Stream::copeland, t_), bopt);
}

AcqConfig Session::acq_config() const {
  AcqConfig a;
  a.beta_sqrt = cfg_.beta_sqrt;
  a.gamma = cfg_.gamma;
  a.t = t_;
  a.rho = cfg_.rho;
  return a;
}

Vec Session::incumbent() const {
  Eigen::Index best = 0;
  data_.y.maxCoeff(&best);
  return data_.X.row(best).transpose();
}

double Session::simple_regret() const { return objective_.optimum_value() - f_true_.maxCoeff(); }

const PendingPair& Session::step_candidates() {
  if (phase_ != Phase::ready) throw StateError("step_candidates: a pair is already awaiting a choice");
  if (finished()) throw StateError("step_candidates: the iteration budget is exhausted");
  const auto start = Clock::now();
  const GPModel& gp = *gp_;
  const Domain& dom = objective_.domain();
  const std::uint64_t seed = derive_seed(cfg_.seed, Stream::candidates, t_);
  const double beta = cfg_.beta_sqrt;
  auto ucb_field = [beta](const GPModel& g) {
    return [&g, beta](const Vec& x) { return ucb(g, x, beta); };
  };

  PendingPair p;
  switch (cfg_.baseline) {
    case Baseline::coexbo: {
      const CandidatePair pair = generate_pair(gp, *belief_, acq_config(), raw_y_stats(data_.y), seed);
      p.x1 = pair.x1;
      p.x2 = pair.x2;
      break;
    }
    case Baseline::coexbo_pibo: {
      p.x1 = maximize_af(ucb_field(gp), dom, seed);
      const SoftCopeland& sc = *belief_;
      const double g = cfg_.gamma_pibo;
      const int t = t_;
      p.x2 = maximize_af([&](const Vec& x) { return pibo_af(gp, sc, x, g, t, beta); }, dom,
                         derive_seed(seed, 2));
      break;
    }
    case Baseline::random: {
      Rng rng(seed);
      p.x1 = rng.uniform_in(dom);
      p.x2 = rng.uniform_in(dom);
      break;
    }
    case Baseline::manual:
      p.x1 = manual_design(objective_, cfg_.synthetic, seed);
      p.x2 = p.x1;
      break;
    case Baseline::ucb:
      p.x1 = maximize_af(ucb_field(gp), dom, seed);
      p.x2 = p.x1;
      break;
    case Baseline::ts:
      p.x1 = thompson_candidate(gp, seed);
      p.x2 = p.x1;
      break;
    case Baseline::prior_sampling:
      p.x1 = sample_from_belief(*belief_, 1, seed).X.row(0).transpose();
      p.x2 = p.x1;
      break;
    case Baseline::batch_ucb: {
      // Kriging believer: pretend the first point returned its posterior mean.
      p.x1 = maximize_af(ucb_field(gp), dom, seed);
      const GPModel believer = condition_on(gp, p.x1, posterior(gp, p.x1).mean);
      p.x2 = maximize_af(ucb_field(believer), dom, derive_seed(seed, 2));
      break;
    }
    case Baseline::batch_ts:
      p.x1 = thompson_candidate(gp, derive_seed(seed, 1));
      p.x2 = thompson_candidate(gp, derive_seed(seed, 2));
      break;
    case Baseline::pibo: {
      const SoftCopeland& sc = *belief_;
      const double g = cfg_.gamma_pibo;
      const int t = t_;
      p.x1 = maximize_af([&](const Vec& x) { return pibo_af(gp, sc, x, g, t, beta); }, dom, seed);
      p.x2 = p.x1;
      break;
    }
  }

  if (cfg_.explain) p.bundle = build_bundle(gp, belief(), p.x1, p.x2, incumbent(), beta);
  if (cfg_.record_timing) {
    p.gen_ms = ms_since(start);
    p.served_at_ms = epoch_ms();
  }
  pending_ = std::move(p);
  phase_ = Phase::awaiting_choice;
  return *pending_;
}

int Session::synthetic_choice() const {
  if (phase_ != Phase::awaiting_choice) throw StateError("synthetic_choice: no pending pair");
  if (pending_->x1 == pending_->x2) return 1;
  return synthetic_select(objective_, pending_->x1, pending_->x2, cfg_.synthetic,
                          derive_seed(cfg_.seed, Stream::human, t_));
}

const IterationRecord& Session::apply_choice(int choice, std::optional<double> human_ms) {
  if (phase_ != Phase::awaiting_choice) throw StateError("apply_choice: no pair is awaiting a choice");
  if (choice != 1 && choice != 2) throw InputError("apply_choice: choice must be 1 or 2");
  const PendingPair& p = *pending_;
  IterationRecord rec;
  rec.t = t_;
  rec.x1 = p.x1;
  rec.x2 = p.x2;
  rec.choice = choice;
  const Vec& chosen = choice == 1 ? p.x1 : p.x2;
  const Vec& other = choice == 1 ? p.x2 : p.x1;
  rec.f_true = objective_(chosen);
  rec.y = observe(objective_, chosen, cfg_.noise_var, derive_seed(cfg_.seed, Stream::observe, t_));

  data_.append(chosen, rec.y);
  f_true_.conservativeResize(f_true_.size() + 1);
  f_true_[f_true_.size() - 1] = rec.f_true;
  if (learns_preferences(cfg_.baseline)) duels_.push_back({p.x1, p.x2, choice == 1 ? 1 : 0});

  fit_objective_model(false);
  if (learns_preferences(cfg_.baseline)) fit_preference_model(false);

  rec.feedback = selection_accuracy(*gp_, chosen, other, cfg_.n_mc,
                                    derive_seed(cfg_.seed, Stream::feedback, t_));
  if (p.x1 != p.x2) rec.selection_correct = rec.f_true >= objective_(other);
  if (objective_.has_optimum()) rec.regret = simple_regret();
  if (cfg_.record_timing) {
    rec.gen_ms = p.gen_ms;
    rec.human_ms = human_ms ? *human_ms : static_cast<double>(epoch_ms() - p.served_at_ms);
  }
  if (p.bundle) {
    ExplanationBundle summary = *p.bundle;
    summary.gp_mean.resize(0, 0);
    summary.gp_std.resize(0, 0);
    summary.belief.resize(0, 0);
    summary.feedback = rec.feedback;
    rec.explanation = std::move(summary);
  }

  history_.push_back(std::move(rec));
  pending_.reset();
  ++t_;
  phase_ = Phase::ready;
  return history_.back();
}

const IterationRecord& Session::run_iteration() {
  step_candidates();
  const auto start = Clock::now();
  const int choice = synthetic_choice();
  return apply_choice(choice, ms_since(start));
}

std::vector<double> run_baseline(Baseline kind, SessionConfig cfg) {
  cfg.baseline = kind;
  Session s = Session::init(std::move(cfg));
  if (!s.objective().has_optimum()) {
    throw InputError("run_baseline: objective '" + s.objective().name() +
                     "' has no known optimum; report the best observed value instead");
  }
  std::vector<double> trace;
  while (!s.finished()) trace.push_back(*s.run_iteration().regret);
  return trace;
}

}  // namespace coexbo
