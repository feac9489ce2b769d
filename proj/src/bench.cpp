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

#include "coexbo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace coexbo {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string failures_csv(const std::vector<Failure>& failures) {
  std::string s = "task,baseline,seed,error\n";
  for (const Failure& f : failures) {
    std::string msg = f.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    s += f.task + "," + f.baseline + "," + std::to_string(f.seed) + "," + msg + "\n";
  }
  return s;
}

}  // namespace

SessionConfig SuiteSpec::default_base() {
  SessionConfig c;
  c.explain = false;
  c.record_timing = false;
  return c;
}

void SuiteSpec::validate() const {
  if (tasks.empty()) throw InputError("suite: at least one task is required");
  if (baselines.empty()) throw InputError("suite: at least one baseline is required");
  if (seeds.empty()) throw InputError("suite: at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InputError("suite: seeds must be distinct");
  }
  for (const std::string& t : tasks) make_objective(t);
  base.validate();
}

std::string trace_csv(const std::string& task, const Session& s) {
  std::string out = std::string(kTraceHeader) + "\n";
  const std::string base = to_string(s.config().baseline);
  const std::string seed = std::to_string(s.config().seed);
  for (const IterationRecord& r : s.history()) {
    out += task + "," + base + "," + seed + "," + std::to_string(r.t) + ",";
    out += (r.regret ? num(*r.regret) : std::string()) + ",";
    out += (r.selection_correct ? (*r.selection_correct ? "1" : "0") : "") + std::string(",");
    out += num(r.gen_ms) + "," + num(r.human_ms) + "\n";
  }
  return out;
}

std::string trace_path(const std::string& out_dir, const std::string& task, Baseline b,
                       std::uint64_t seed) {
  return (fs::path(out_dir) / task / to_string(b) / ("seed" + std::to_string(seed) + ".csv"))
      .string();
}

SummaryRow summarize(const std::string& task, const std::string& baseline,
                     const std::vector<double>& finals) {
  SummaryRow row;
  row.task = task;
  row.baseline = baseline;
  row.n_seeds = static_cast<int>(finals.size());
  if (finals.empty()) return row;
  double sum = 0.0;
  for (double v : finals) sum += v;
  row.mean = sum / finals.size();
  if (finals.size() > 1) {
    double ss = 0.0;
    for (double v : finals) ss += (v - row.mean) * (v - row.mean);
    row.stderr_ = std::sqrt(ss / (finals.size() - 1)) / std::sqrt(static_cast<double>(finals.size()));
  }
  return row;
}

std::vector<SummaryRow> summarize_traces(const std::string& out_dir) {
  // (task, baseline) -> seed -> final regret; ordered maps fix the row order.
  std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, double>> finals;
  if (!fs::is_directory(out_dir)) throw InputError("no such directory: " + out_dir);
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    const fs::path& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".csv") continue;
    const std::string stem = p.stem().string();
    if (stem.rfind("seed", 0) != 0) continue;
    std::ifstream in(p);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
      throw InputError("unexpected trace header in " + p.string());
    }
    std::string last;
    while (std::getline(in, line)) {
      if (!line.empty()) last = line;
    }
    if (last.empty()) throw InputError("empty trace " + p.string());
    const std::vector<std::string> f = split(last);
    if (f.size() != 8) throw InputError("malformed trace row in " + p.string());
    if (f[4].empty()) throw InputError("trace without regret: " + p.string());
    finals[{f[0], f[1]}][std::stoull(f[2])] = std::stod(f[4]);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, by_seed] : finals) {
    std::vector<double> v;
    for (const auto& [seed, r] : by_seed) v.push_back(r);
    rows.push_back(summarize(key.first, key.second, v));
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = std::string(kSummaryHeader) + "\n";
  for (const SummaryRow& r : rows) {
    s += r.task + "," + r.baseline + "," + std::to_string(r.n_seeds) + "," + num(r.mean) + "," +
         num(r.stderr_) + "\n";
  }
  return s;
}

SuiteResult run_suite(const SuiteSpec& spec, const std::string& out_dir, std::ostream* log) {
  spec.validate();
  SuiteResult result;
  for (const std::string& task : spec.tasks) {
    for (Baseline b : spec.baselines) {
      for (std::uint64_t seed : spec.seeds) {
        SessionConfig cfg = spec.base;
        cfg.objective = make_objective(task).definition();
        cfg.baseline = b;
        cfg.seed = seed;
        try {
          Session s = Session::init(cfg);
          while (!s.finished()) s.run_iteration();
          write_file(trace_path(out_dir, task, b, seed), trace_csv(task, s));
          if (log) {
            *log << task << " " << to_string(b) << " seed " << seed << ": final regret "
                 << num(s.simple_regret()) << "\n";
          }
        } catch (const std::exception& e) {
          result.failures.push_back({task, to_string(b), seed, e.what()});
          if (log) *log << task << " " << to_string(b) << " seed " << seed << ": FAILED " << e.what() << "\n";
        }
      }
    }
  }
  const fs::path manifest = fs::path(out_dir) / "failures.csv";
  if (!result.failures.empty()) {
    write_file(manifest, failures_csv(result.failures));
  } else if (fs::exists(manifest)) {
    fs::remove(manifest);
  }
  fs::create_directories(out_dir);
  result.summary = summarize_traces(out_dir);
  write_file(fs::path(out_dir) / "summary.csv", summary_csv(result.summary));
  return result;
}

std::vector<SweepVariant> sweep_variants() {
  return {
      {"npref10", 10, 0.1, false},      {"npref100", 100, 0.1, false},
      {"npref500", 500, 0.1, false},    {"sigma1", 100, 1.0, false},
      {"sigma100", 100, 100.0, false},  {"adversarial_sigma0.1", 100, 0.1, true},
      {"adversarial_sigma1", 100, 1.0, true},
  };
}

SuiteResult run_sweep(const SuiteSpec& spec, const std::string& out_dir, std::ostream* log) {
  SuiteResult all;
  std::string table = "variant," + std::string(kSummaryHeader) + "\n";
  for (const SweepVariant& v : sweep_variants()) {
    SuiteSpec s = spec;
    s.base.n_pref = v.n_pref;
    s.base.synthetic.sigma_pref_sq = v.sigma_pref_sq;
    s.base.synthetic.adversarial = v.adversarial;
    if (log) *log << "variant " << v.label << "\n";
    const SuiteResult r = run_suite(s, (fs::path(out_dir) / v.label).string(), log);
    for (const Failure& f : r.failures) all.failures.push_back(f);
    const std::string rows = summary_csv(r.summary);
    std::istringstream in(rows);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) table += v.label + "," + line + "\n";
    for (const SummaryRow& row : r.summary) all.summary.push_back(row);
  }
  write_file(fs::path(out_dir) / "sweep_summary.csv", table);
  return all;
}

}  // namespace coexbo
