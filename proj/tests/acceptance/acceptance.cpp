// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
// the measured quantity next to its threshold. Pass criterion names as
// arguments to run a subset.

#include "coexbo/acquisition.hpp"
#include "coexbo/bench.hpp"
#include "coexbo/engine.hpp"
#include "coexbo/explain.hpp"
#include "coexbo/gp.hpp"
#include "coexbo/oracle.hpp"
#include "coexbo/preference.hpp"
#include "coexbo/random.hpp"
#include "coexbo/sobol.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace coexbo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Vec v1(double a) { return Vec::Constant(1, a); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coexbo_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Outcome gp_oracle() {
  Rng rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int d = 1 + rng.uniform_int(5);
    const int n = 2 + rng.uniform_int(29);
    const Domain dom(Vec::Constant(d, -1.0 - rng.uniform()), Vec::Constant(d, 1.0 + 2.0 * rng.uniform()));
    const Vec w = rng.standard_normal(d);
    auto f = [&](const Vec& x) { return std::sin(w.dot(x)) + 0.3 * x.squaredNorm(); };
    const GPModel gp = fit_gp(fixtures::sample_dataset(dom, n, f, 100 + k), dom, k);
    for (int q = 0; q < 10; ++q) {
      const Vec x = rng.uniform_in(dom);
      const Prediction p = posterior(gp, x);
      const auto [m, v] = oracle_ref::dense_posterior(gp, x);
      worst = std::max(worst, std::abs(p.mean - m) / std::max(1.0, std::abs(m)));
      worst = std::max(worst, std::abs(p.variance - v) / std::max(1e-3, std::abs(v)));
    }
  }
  return {worst <= 1e-8, fmt("max rel err %.3g <= 1e-8", worst)};
}

Outcome product_gaussian() {
  Rng rng(7);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double m1 = rng.uniform(-5.0, 5.0), m2 = rng.uniform(-5.0, 5.0);
    const double a = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const double b = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const GaussianMoments g = product_of_gaussians(m1, a, m2, b);
    const auto [mean, var] = oracle_ref::numeric_gaussian_product(m1, a, m2, b);
    worst = std::max({worst, std::abs(g.mean - mean), std::abs(g.var - var)});
  }
  return {worst <= 1e-10, fmt("max abs err %.3g <= 1e-10", worst)};
}

Outcome no_harm() {
  const Objective obj = make_objective("ackley");
  const Domain& dom = obj.domain();
  const Mat design = dom.rows_from_unit(sobol_points(20, dom.dim(), 3));
  Dataset data;
  data.X = design;
  data.y.resize(design.rows());
  for (Eigen::Index i = 0; i < design.rows(); ++i) data.y[i] = obj(design.row(i).transpose());
  const GPModel gp = fit_gp(data, dom, 3);
  const SoftCopeland sc = fixtures::learned_belief(dom, 100, [&](const Vec& x) { return obj(x); }, 5);
  const RawYStats stats = raw_y_stats(data.y);
  const Mat grid = dom.rows_from_unit(sobol_points(2048, dom.dim(), 11));

  std::vector<double> u(grid.rows());
  for (Eigen::Index i = 0; i < grid.rows(); ++i) u[i] = ucb(gp, grid.row(i).transpose(), 2.0);
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double range = *hi - *lo;

  bool monotone = true;
  double prev = 1e300;
  std::string seq;
  for (int t : {1, 10, 100, 1000}) {
    AcqConfig cfg;
    cfg.t = t;
    cfg.rho = RhoConvention::swapped;
    double sup = 0.0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      sup = std::max(sup, std::abs(coexbo_af(gp, sc, grid.row(i).transpose(), cfg, stats) - u[i]));
    }
    monotone = monotone && sup <= prev;
    prev = sup;
    seq += fmt("%.3g ", sup);
  }
  const bool small = prev <= 1e-3 * range;
  return {monotone && small, "sup|af-ucb| over t=1,10,100,1000: " + seq +
                                 fmt("(limit %.3g at t=1000)", 1e-3 * range)};
}

Outcome theorem_diagnostic() {
  const double example = regret_ratio(0.0, 1.0, 1.0);
  const double example_err = std::abs(example - std::sqrt(0.5));

  // 50-point grid on [0, 1]; the belief comes from noise-free duels of f,
  // which makes it calibrated.
  auto f = [](double x) { return std::exp(-std::pow(x - 0.7, 2) / 0.02) + 0.4 * std::sin(5.0 * x); };
  const Domain dom = Domain::unit(1);
  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i) grid[i] = i / 49.0;
  std::vector<DuelRecord> duels;
  Rng rng(13);
  for (int k = 0; k < 60; ++k) {
    const double a = grid[rng.uniform_int(50)], b = grid[rng.uniform_int(50)];
    duels.push_back({v1(a), v1(b), f(a) > f(b) ? 1 : 0});
  }
  const PreferenceGP g = fit_preference_gp(duels, dom, 0.01, 1);
  const SoftCopeland sc = build_soft_copeland(g, 256, 1);

  Dataset data;
  data.X.resize(3, 1);
  data.X << 0.1, 0.5, 0.9;
  data.y.resize(3);
  for (int i = 0; i < 3; ++i) data.y[i] = f(data.X(i, 0));

  double worst = 0.0;
  int iters = 0;
  for (int t = 1; t <= 20; ++t) {
    const GPModel gp = fit_gp(data, dom, t);
    const RawYStats stats = raw_y_stats(data.y);
    AcqConfig cfg;
    cfg.t = t;
    cfg.rho = RhoConvention::swapped;
    cfg.beta_sqrt = std::sqrt(finite_domain_beta(50, t, 0.1));
    int i1 = 0, i2 = 0;
    double b1 = -1e300, b2 = -1e300;
    for (int i = 0; i < 50; ++i) {
      const double a1 = ucb(gp, v1(grid[i]), cfg.beta_sqrt);
      const double a2 = coexbo_af(gp, sc, v1(grid[i]), cfg, stats);
      if (a1 > b1) b1 = a1, i1 = i;
      if (a2 > b2) b2 = a2, i2 = i;
    }
    const RegretDiagnostics diag = regret_ratio_bound(gp, sc, v1(grid[i1]), v1(grid[i2]), cfg, stats);
    worst = std::max(worst, diag.r_ratio_bound);
    ++iters;
    const double chosen = f(grid[i1]) >= f(grid[i2]) ? grid[i1] : grid[i2];
    data.append(v1(chosen), f(chosen));
  }
  return {worst < 1.0 && example_err <= 1e-12,
          fmt("max R over %g iterations %.6f < 1; |R_example - sqrt(1/2)| = %.3g <= 1e-12", iters, worst,
              example_err)};
}

Outcome shapley_axioms() {
  Rng rng(31);
  double eff = 0.0, sym = 0.0, null_p = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 5;  // 2..6
    const int n = 6 + rng.uniform_int(10);
    const Domain dom = Domain::unit(d);
    const Vec w = rng.standard_normal(d);
    auto f = [&](const Vec& x) { return std::sin(3.0 * w.dot(x)) + x.squaredNorm(); };
    const GPModel fitted = fit_gp(fixtures::sample_dataset(dom, n, f, 500 + k), dom, k);
    const Vec x = rng.uniform_in(dom);
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);

    // Efficiency.
    const ShapleyTriple tri = shapley_triple(fitted, x, 2.0);
    const double lambda = default_lambda_s(fitted);
    const std::pair<const ShapleyAttribution*, ShapleyTarget> parts[] = {
        {&tri.af, ShapleyTarget::af}, {&tri.mean, ShapleyTarget::mean}, {&tri.std, ShapleyTarget::std}};
    for (const auto& [a, target] : parts) {
      const double full = value_function(fitted, x, all, 2.0, lambda, target);
      eff = std::max(eff, std::abs(a->phi.sum() + a->base - full));
    }

    // Null player: infinite lengthscale on the last feature.
    KernelParams p = fitted.params();
    p.lengthscales[d - 1] = 1e8;
    const GPModel ignoring(fitted.domain(), fitted.data(), p, fitted.y_mean(), fitted.y_std());
    const ShapleyTriple tn = shapley_triple(ignoring, x, 2.0);
    null_p = std::max({null_p, std::abs(tn.af.phi[d - 1]), std::abs(tn.mean.phi[d - 1]),
                       std::abs(tn.std.phi[d - 1])});

    // Symmetry: data closed under swapping features 0 and 1, tied
    // lengthscales, query with x0 == x1.
    Dataset sd;
    sd.X.resize(2 * n, d);
    sd.y.resize(2 * n);
    for (int i = 0; i < n; ++i) {
      Vec a = fitted.data().X.row(i).transpose();
      Vec b = a;
      std::swap(b[0], b[1]);
      const double y = std::sin(3.0 * (a[0] + a[1])) + a.squaredNorm();
      sd.X.row(2 * i) = a.transpose();
      sd.X.row(2 * i + 1) = b.transpose();
      sd.y[2 * i] = y;
      sd.y[2 * i + 1] = y;
    }
    KernelParams ps = fitted.params();
    ps.lengthscales[1] = ps.lengthscales[0];
    ps.noise = std::max(ps.noise, 1e-3);
    const auto [ym, ys] = standardization(sd.y);
    const GPModel sg(dom, sd, ps, ym, ys);
    Vec xs = x;
    xs[1] = xs[0];
    const ShapleyTriple ts = shapley_triple(sg, xs, 2.0);
    for (const ShapleyAttribution* a : {&ts.af, &ts.mean, &ts.std}) {
      sym = std::max(sym, std::abs(a->phi[0] - a->phi[1]) / std::max(1.0, std::abs(a->phi[0])));
    }
  }
  const bool ok = eff <= 1e-8 && sym <= 1e-8 && null_p <= 1e-6;
  return {ok, fmt("efficiency %.3g <= 1e-8, symmetry %.3g <= 1e-8, null player %.3g <= 1e-6", eff, sym,
                  null_p)};
}

Outcome bq_vs_mc() {
  const auto start = std::chrono::steady_clock::now();
  auto f = [](double x) { return std::exp(-std::pow(x - 0.3, 2) / 0.02) + 0.5 * std::exp(-std::pow(x - 0.78, 2) / 0.01); };
  const Domain dom = Domain::unit(1);
  std::vector<DuelRecord> duels;
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    const double a = rng.uniform(), b = rng.uniform();
    duels.push_back({v1(a), v1(b), f(a) > f(b) ? 1 : 0});
  }
  const PreferenceGP g = fit_preference_gp(duels, dom, 0.01, 2);
  const SoftCopeland sc = build_soft_copeland(g, 256, 2);
  std::vector<double> bq, mc;
  int arg_bq = 0, arg_mc = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = i / 99.0;
    bq.push_back(copeland_mean(sc, v1(x)));
    mc.push_back(mc_soft_copeland(g, v1(x), 1000, 64, 40 + i));
    if (bq[i] > bq[arg_bq]) arg_bq = i;
    if (mc[i] > mc[arg_mc]) arg_mc = i;
  }
  const double r = oracle_ref::pearson(bq, mc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = r >= 0.9 && std::abs(arg_bq - arg_mc) <= 2 && secs < 60.0;
  return {ok, fmt("pearson %.4f >= 0.9, argmax cells %g vs %g (<= 2 apart), %.1fs < 60s", r, arg_bq, arg_mc,
                  secs)};
}

Outcome preference_argmax() {
  auto f = [](double x) { return std::exp(-std::pow(x - 0.62, 2) / 0.01) + 0.6 * std::exp(-std::pow(x - 0.2, 2) / 0.01); };
  const Domain dom = Domain::unit(1);
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[i] = i / 99.0;
  std::vector<DuelRecord> duels;
  Rng rng(23);
  for (int k = 0; k < 500; ++k) {
    const double a = grid[rng.uniform_int(100)], b = grid[rng.uniform_int(100)];
    duels.push_back({v1(a), v1(b), f(a) > f(b) ? 1 : 0});
  }
  const PreferenceGP g = fit_preference_gp(duels, dom, 0.01, 4);
  const SoftCopeland sc = build_soft_copeland(g, 256, 4);
  int arg_c = 0, arg_f = 0;
  for (int i = 0; i < 100; ++i) {
    if (copeland_mean(sc, v1(grid[i])) > copeland_mean(sc, v1(grid[arg_c]))) arg_c = i;
    if (f(grid[i]) > f(grid[arg_f])) arg_f = i;
  }
  return {std::abs(arg_c - arg_f) <= 1, fmt("argmax copeland cell %g, argmax f cell %g (<= 1 apart)", arg_c, arg_f)};
}

// Shared between the convergence and robustness criteria.
const SummaryRow* g_ucb_row = nullptr;
SummaryRow g_ucb_storage;

const SummaryRow& ucb_summary() {
  if (!g_ucb_row) {
    SuiteSpec spec;
    spec.baselines = {Baseline::ucb};
    const SuiteResult r = run_suite(spec, scratch_dir("ucb").string());
    if (!r.ok()) throw Error("ucb suite failed: " + r.failures.front().error);
    g_ucb_storage = r.summary.front();
    g_ucb_row = &g_ucb_storage;
  }
  return *g_ucb_row;
}

Outcome coexbo_vs_ucb(bool adversarial) {
  const auto start = std::chrono::steady_clock::now();
  SuiteSpec spec;
  spec.baselines = {Baseline::coexbo};
  spec.base.synthetic.sigma_pref_sq = 0.1;
  spec.base.synthetic.adversarial = adversarial;
  const SuiteResult r = run_suite(spec, scratch_dir(adversarial ? "adversarial" : "coexbo").string());
  if (!r.ok()) return {false, "coexbo run failed: " + r.failures.front().error};
  const SummaryRow& c = r.summary.front();
  const SummaryRow& u = ucb_summary();
  const double mins = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const double k = adversarial ? 2.0 : 1.0;
  const double limit = u.mean + k * u.stderr_;
  return {c.mean <= limit && mins <= 30.0,
          fmt("coexbo mean %.4f <= ucb mean + %g stderr = %.4f, %.1f min", c.mean, k, limit, mins)};
}

Outcome feedback_degenerate() {
  bool ok = true;
  int cases = 0;
  for (const std::string& name : {"ackley", "holder_table", "styblinski_tang", "michalewicz", "rosenbrock",
                                  "gaussian_bump", "electrolyte"}) {
    const Objective obj = make_objective(name);
    const Domain& dom = obj.domain();
    const Mat X = dom.rows_from_unit(sobol_points(8, dom.dim(), 1));
    Dataset data;
    data.X = X;
    data.y.resize(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) data.y[i] = obj(X.row(i).transpose());
    const GPModel gp = fit_gp(data, dom, 1);
    Rng rng(3);
    for (int q = 0; q < 5; ++q) {
      const Vec x = q == 0 ? Vec(X.row(0).transpose()) : rng.uniform_in(dom);
      const SelectionFeedback fb = selection_accuracy(gp, x, x, 256, q);
      ok = ok && fb.prob_mean == 0.5 && fb.prob_var == 0.0;
      ++cases;
    }
  }
  return {ok, fmt("%g identical pairs give exactly 0.5", cases)};
}

Outcome trace_integrity() {
  SuiteSpec spec;
  spec.tasks = {"gaussian_bump", "holder_table"};
  spec.baselines = {Baseline::ucb, Baseline::coexbo};
  spec.seeds = {0, 1, 2};
  spec.base.T = 3;
  spec.base.n_obj = 4;
  spec.base.n_pref = 10;
  spec.base.n_mc = 64;
  const fs::path a = scratch_dir("trace_a");
  const fs::path b = scratch_dir("trace_b");
  const fs::path solo = scratch_dir("trace_solo");
  if (!run_suite(spec, a.string()).ok() || !run_suite(spec, b.string()).ok()) return {false, "suite run failed"};

  const std::string summary = slurp(a / "summary.csv");
  const bool replay = summary_csv(summarize_traces(a.string())) == summary;
  const bool rerun = slurp(b / "summary.csv") == summary;

  bool traces_same = true;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    traces_same = traces_same && slurp(e.path()) == slurp(b / fs::relative(e.path(), a));
  }

  // A seed run on its own matches the same seed inside the larger suite.
  SuiteSpec one = spec;
  one.seeds = {1};
  if (!run_suite(one, solo.string()).ok()) return {false, "single-seed run failed"};
  bool isolated = true;
  for (const std::string& task : spec.tasks) {
    for (Baseline bl : spec.baselines) {
      isolated = isolated && slurp(trace_path(solo.string(), task, bl, 1)) ==
                                 slurp(trace_path(a.string(), task, bl, 1));
    }
  }
  const bool ok = replay && rerun && traces_same && isolated;
  return {ok, std::string("replayed summary ") + (replay ? "identical" : "differs") + ", rerun " +
                  (rerun && traces_same ? "identical" : "differs") + ", seed isolation " +
                  (isolated ? "holds" : "broken")};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"gp_oracle", gp_oracle},
      {"product_gaussian", product_gaussian},
      {"no_harm", no_harm},
      {"regret_ratio", theorem_diagnostic},
      {"shapley_axioms", shapley_axioms},
      {"bq_vs_mc", bq_vs_mc},
      {"preference_argmax", preference_argmax},
      {"convergence", [] { return coexbo_vs_ucb(false); }},
      {"robustness", [] { return coexbo_vs_ucb(true); }},
      {"feedback_degenerate", feedback_degenerate},
      {"trace_integrity", trace_integrity},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
