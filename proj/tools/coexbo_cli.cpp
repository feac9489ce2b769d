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

// Command-line front end: benchmark suites, robustness sweeps, summary
// replay and the HTTP session service.

#include "coexbo/bench.hpp"
#include "coexbo/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace coexbo;

struct SuiteFlags {
  std::vector<std::string> tasks{"ackley"};
  std::vector<std::string> baselines{"coexbo"};
  int seeds = 10;
  std::vector<std::uint64_t> seed_list;
  int iters = 50;
  int nobj = 10;
  int npref = 100;
  double gamma = 0.01;
  double beta = 2.0;
  double sigma_pref = 0.1;
  bool adversarial = false;
  double noise_var = 0.0;
  std::string rho = "swapped";
  std::string out = "out";
  bool timing = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, SuiteFlags& f, bool human_flags) {
  cmd->add_option("--task", f.tasks, "Objective names (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--baseline", f.baselines, "Baselines (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  auto* seeds = cmd->add_option("--seeds", f.seeds, "Number of seeds, 0..N-1")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  cmd->add_option("--seed-list", f.seed_list, "Explicit seeds (comma separated)")
      ->delimiter(',')
      ->excludes(seeds);
  cmd->add_option("--iters", f.iters, "Iterations per run")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--nobj", f.nobj, "Initial objective points")->check(CLI::Range(2, 100000))->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Belief decay rate (> 0)")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--beta", f.beta, "Square root of the UCB beta")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--noise-var", f.noise_var, "Observation noise variance")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--rho", f.rho, "Belief scaling convention")
      ->check(CLI::IsMember({"direct", "swapped"}))
      ->capture_default_str();
  if (human_flags) {
    cmd->add_option("--npref", f.npref, "Initial duels")->check(CLI::Range(2, 100000))->capture_default_str();
    cmd->add_option("--sigma-pref", f.sigma_pref, "Synthetic human noise variance")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_flag("--adversarial", f.adversarial, "Flip every synthetic answer");
  }
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_flag("--timing", f.timing, "Record wall-clock columns (otherwise zero)");
  cmd->add_flag("--quiet", f.quiet, "No per-run progress lines");
}

SuiteSpec to_spec(const SuiteFlags& f) {
  SuiteSpec spec;
  spec.tasks = f.tasks;
  spec.baselines.clear();
  for (const std::string& b : f.baselines) spec.baselines.push_back(baseline_from_string(b));
  spec.seeds.clear();
  if (!f.seed_list.empty()) {
    spec.seeds = f.seed_list;
  } else {
    for (int s = 0; s < f.seeds; ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  SessionConfig& c = spec.base;
  c.T = f.iters;
  c.n_obj = f.nobj;
  c.n_pref = f.npref;
  c.gamma = f.gamma;
  c.beta_sqrt = f.beta;
  c.noise_var = f.noise_var;
  c.synthetic.sigma_pref_sq = f.sigma_pref;
  c.synthetic.adversarial = f.adversarial;
  c.rho = rho_convention_from_string(f.rho);
  c.record_timing = f.timing;
  spec.validate();
  return spec;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coexbo: human-in-the-loop Bayesian optimization with preference priors", "coexbo"};
  app.require_subcommand(0, 1);

  SuiteFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and write CSV traces");
  add_common(bench, bench_flags, true);

  SuiteFlags sweep_flags;
  sweep_flags.baselines = {"coexbo", "ucb"};
  auto* sweep = app.add_subcommand("sweep", "Robustness sweep over prior size and human accuracy");
  add_common(sweep, sweep_flags, false);

  std::string replay_dir;
  bool replay_check = false;
  auto* replay = app.add_subcommand("replay", "Recompute the summary table from trace files");
  replay->add_option("dir", replay_dir, "Suite output directory")->required();
  replay->add_flag("--check", replay_check, "Fail unless summary.csv is reproduced byte for byte");

  std::string bind = env_or(kBindEnv, "127.0.0.1:8080");
  std::string data_dir = env_or(kDataDirEnv, "coexbo-data");
  auto* serve = app.add_subcommand("serve", "Serve interactive sessions over HTTP");
  serve->add_option("--bind", bind, "host:port (env " + std::string(kBindEnv) + ")")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Session directory (env " + std::string(kDataDirEnv) + ")")
      ->capture_default_str();

  if (argc <= 1) {
    std::cout << app.help();
    return 0;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*bench || *sweep) {
      const bool is_sweep = static_cast<bool>(*sweep);
      const SuiteFlags& f = is_sweep ? sweep_flags : bench_flags;
      const SuiteSpec spec = to_spec(f);
      std::ostream* log = f.quiet ? nullptr : &std::cerr;
      const SuiteResult r = is_sweep ? run_sweep(spec, f.out, log) : run_suite(spec, f.out, log);
      std::cout << summary_csv(r.summary);
      if (!r.ok()) {
        std::cerr << r.failures.size() << " run(s) failed; see failures.csv under " << f.out << "\n";
        return 1;
      }
      return 0;
    }
    if (*replay) {
      const std::string table = summary_csv(summarize_traces(replay_dir));
      std::cout << table;
      if (replay_check) {
        const std::string path = (std::filesystem::path(replay_dir) / "summary.csv").string();
        if (read_text(path) != table) {
          std::cerr << "replayed summary differs from " << path << "\n";
          return 1;
        }
      }
      return 0;
    }
    if (*serve) {
      const BindAddress addr = parse_bind_address(bind);
      SessionService service(data_dir);
      HttpServer server(service);
      const int port = server.bind(addr.host, addr.port);
      if (port < 0) {
        std::cerr << "cannot bind " << addr.host << ":" << addr.port << "\n";
        return 1;
      }
      std::cerr << "serving " << service.size() << " session(s) from " << data_dir << " on "
                << addr.host << ":" << port << "\n";
      return server.listen() ? 0 : 1;
    }
    std::cout << app.help();
    return 0;
  } catch (const coexbo::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
