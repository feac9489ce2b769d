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

#include "coexbo/acquisition.hpp"
#include "coexbo/explain.hpp"
#include "coexbo/gp.hpp"
#include "coexbo/oracle.hpp"
#include "coexbo/preference.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coexbo {

enum class Baseline {
  random,
  manual,
  ucb,
  ts,
  prior_sampling,
  batch_ucb,
  batch_ts,
  pibo,
  coexbo_pibo,
  coexbo,
};

std::string to_string(Baseline b);
Baseline baseline_from_string(const std::string& s);
std::vector<Baseline> all_baselines();
// Baselines that consult the preference belief.
bool uses_belief(Baseline b);
// Baselines that update the belief with every answered pair.
bool learns_preferences(Baseline b);
// Baselines that show the human two distinct candidates.
bool shows_pair(Baseline b);

enum class HumanSource { synthetic, interactive };

struct FieldError {
  std::string field;
  std::string message;
};

// Invalid configuration; carries one entry per offending field.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

struct SessionConfig {
  ObjectiveDef objective = builtin_definition("ackley");
  int n_obj = 10;
  int n_pref = 100;
  int T = 50;
  double beta_sqrt = 2.0;
  double gamma = 0.01;
  double gamma_pibo = 10.0;
  double noise_var = 0.0;
  HumanSource human = HumanSource::synthetic;
  // Answers synthetic comparisons. Interactive sessions still use it to label
  // the initial duels, which stand in for prior knowledge gathered offline.
  SyntheticHumanConfig synthetic;
  Baseline baseline = Baseline::coexbo;
  std::uint64_t seed = 0;
  double alpha_eps = 0.01;
  int n_mc = 256;
  RhoConvention rho = RhoConvention::swapped;
  bool explain = true;
  bool record_timing = true;

  std::vector<FieldError> check() const;
  void validate() const;  // throws ConfigError
};

enum class Phase { ready, awaiting_choice };

std::string to_string(Phase p);

struct PendingPair {
  Vec x1;
  Vec x2;
  std::optional<ExplanationBundle> bundle;
  double gen_ms = 0.0;
  // Wall-clock milliseconds since the epoch when the pair was produced.
  std::int64_t served_at_ms = 0;
};

struct IterationRecord {
  int t = 0;
  Vec x1;
  Vec x2;
  int choice = 1;
  double y = 0.0;          // noisy observation at the chosen point
  double f_true = 0.0;     // noiseless objective at the chosen point
  std::optional<double> regret;
  // Whether the chosen arm has the larger true objective (pairs only).
  std::optional<bool> selection_correct;
  SelectionFeedback feedback;
  double gen_ms = 0.0;
  double human_ms = 0.0;
  // Attributions, top-2 dimensions and view rectangle of the pair; heatmaps
  // are not kept in the history.
  std::optional<ExplanationBundle> explanation;

  const Vec& chosen() const { return choice == 1 ? x1 : x2; }
};

/// One optimization run. Iterations alternate strictly between
/// step_candidates (phase ready -> awaiting_choice) and apply_choice
/// (awaiting_choice -> ready). Every random draw is derived from the config
/// seed, the stream and t, so a session needs no generator state.
class Session {
 public:
  static Session init(SessionConfig cfg);

  const SessionConfig& config() const { return cfg_; }
  const Objective& objective() const { return objective_; }
  int t() const { return t_; }
  Phase phase() const { return phase_; }
  bool finished() const { return t_ > cfg_.T; }

  const Dataset& data() const { return data_; }
  const Vec& f_true() const { return f_true_; }
  const std::vector<DuelRecord>& duels() const { return duels_; }
  const GPModel& gp() const { return *gp_; }
  const PreferenceGP* preference() const { return pref_ ? &*pref_ : nullptr; }
  const SoftCopeland* belief() const { return belief_ ? &*belief_ : nullptr; }
  const std::vector<IterationRecord>& history() const { return history_; }
  const std::optional<PendingPair>& pending() const { return pending_; }

  // Point with the largest observed y.
  Vec incumbent() const;
  // f(x*) minus the best noiseless value among all queried points.
  double simple_regret() const;

  const PendingPair& step_candidates();
  const IterationRecord& apply_choice(int choice, std::optional<double> human_ms = std::nullopt);
  // The synthetic human's answer for the pending pair.
  int synthetic_choice() const;
  // step_candidates + synthetic_choice + apply_choice.
  const IterationRecord& run_iteration();

 private:
  Session(SessionConfig cfg, Objective obj);

  void fit_objective_model(bool initial);
  void fit_preference_model(bool initial);
  AcqConfig acq_config() const;

  SessionConfig cfg_;
  Objective objective_;
  int t_ = 1;
  Phase phase_ = Phase::ready;
  Dataset data_;
  Vec f_true_;
  std::vector<DuelRecord> duels_;
  std::optional<GPModel> gp_;
  std::optional<PreferenceGP> pref_;
  std::optional<SoftCopeland> belief_;
  std::vector<IterationRecord> history_;
  std::optional<PendingPair> pending_;

  friend struct SessionCodec;
};

// Regret after each of cfg.T synthetic iterations.
std::vector<double> run_baseline(Baseline kind, SessionConfig cfg);

inline constexpr int kSessionSchemaVersion = 2;

std::string session_to_json(const Session& s);
// Accepts the current schema and migrates older ones; corrupt input or an
// unknown version is a SessionFileError.
Session session_from_json(const std::string& text);
// Writes to a temporary file next to `path` and renames it into place.
void save_session(const Session& s, const std::string& path);
Session load_session(const std::string& path);

std::string config_to_json(const SessionConfig& cfg);
// Unknown or mistyped fields are reported as ConfigError entries.
SessionConfig config_from_json(const std::string& text);

std::string bundle_to_json(const ExplanationBundle& b);

}  // namespace coexbo
