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

#include "coexbo/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace coexbo {

// Column order of every trace file.
inline constexpr const char* kTraceHeader =
    "task,baseline,seed,t,regret,selection_correct,gen_ms,human_ms";
inline constexpr const char* kSummaryHeader =
    "task,baseline,n_seeds,final_regret_mean,final_regret_stderr";

struct SuiteSpec {
  std::vector<std::string> tasks{"ackley"};
  std::vector<Baseline> baselines{Baseline::coexbo};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  // Shared settings; objective, baseline and seed are set per run.
  SessionConfig base = default_base();

  static SessionConfig default_base();
  void validate() const;
};

struct SummaryRow {
  std::string task;
  std::string baseline;
  int n_seeds = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(n); 0 for one seed
};

struct Failure {
  std::string task;
  std::string baseline;
  std::uint64_t seed = 0;
  std::string error;
};

struct SuiteResult {
  std::vector<SummaryRow> summary;
  std::vector<Failure> failures;
  bool ok() const { return failures.empty(); }
};

// Trace file body (header included) for a finished session.
std::string trace_csv(const std::string& task, const Session& s);

std::string trace_path(const std::string& out_dir, const std::string& task, Baseline b,
                       std::uint64_t seed);

/// Runs every (task, baseline, seed) combination, writes one trace per run to
/// out/{task}/{baseline}/seed{k}.csv and out/summary.csv. Failed runs are
/// listed in out/failures.csv; the traces of successful runs are kept.
SuiteResult run_suite(const SuiteSpec& spec, const std::string& out_dir, std::ostream* log = nullptr);

// Summary rows recomputed from the trace files under out_dir, sorted by task
// then baseline.
std::vector<SummaryRow> summarize_traces(const std::string& out_dir);
std::string summary_csv(const std::vector<SummaryRow>& rows);

// Final regret of each run: mean and standard error over seeds.
SummaryRow summarize(const std::string& task, const std::string& baseline,
                     const std::vector<double>& finals);

struct SweepVariant {
  std::string label;
  int n_pref = 100;
  double sigma_pref_sq = 0.1;
  bool adversarial = false;
};

// Prior confidence (n_pref 10/100/500 at sigma^2 0.1), selection accuracy
// (sigma^2 0.1/1/100 at n_pref 100) and adversarial humans (sigma^2 0.1/1).
std::vector<SweepVariant> sweep_variants();

// One suite per variant under out/{label}/, plus out/sweep_summary.csv.
SuiteResult run_sweep(const SuiteSpec& spec, const std::string& out_dir,
                      std::ostream* log = nullptr);

}  // namespace coexbo
