#include "coexbo/acquisition.hpp"
#include "coexbo/sobol.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace coexbo;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

GPModel toy_gp_1d() {
  // Positive outputs so that both belief scalings keep the belief's orientation.
  const Domain dom(v1(0.0), v1(1.0));
  Dataset data;
  data.X.resize(5, 1);
  data.X << 0.05, 0.2, 0.35, 0.5, 0.62;
  data.y.resize(5);
  for (int i = 0; i < 5; ++i) data.y[i] = 5.0 + std::sin(6.0 * data.X(i, 0));
  return fit_gp(data, dom, 1);
}

}  // namespace

TEST_CASE("ucb basics") {
  const GPModel gp = toy_gp_1d();
  const Vec x = v1(0.8);
  CHECK(ucb(gp, x, 0.0) == posterior(gp, x).mean);
  CHECK(ucb(gp, x, 1.0) <= ucb(gp, x, 2.0));
  KernelParams p;
  p.outputscale = 2.25;
  p.lengthscales = v1(0.3);
  p.constant_mean = 0.4;
  const GPModel prior = GPModel::prior(Domain::unit(1), p);
  CHECK(ucb(prior, x, 2.0) == doctest::Approx(0.4 + 2.0 * 1.5));
}

TEST_CASE("scale_belief substitutions") {
  AcqConfig cfg;
  cfg.gamma = 1.0;
  cfg.t = 1;
  ScaledBelief b = scale_belief(0.3, 0.0, {1.5, 2.0}, 2.0, cfg);
  CHECK(b.var_pi == doctest::Approx(2.0));
  CHECK(b.mu_pi == doctest::Approx(1.5 * 0.3 + 2.0));

  b = scale_belief(0.7, 0.2, {0.0, 3.0}, 0.5, cfg);
  CHECK(b.mu_pi == 3.0);
  CHECK(b.var_pi == doctest::Approx(0.5));

  cfg.gamma = 0.01;
  cfg.t = 1000;
  b = scale_belief(0.1, 1.0, {1.0, 1.0}, 1.0, cfg);
  CHECK(b.var_pi == doctest::Approx(1.0 + 1e4));

  b = scale_belief(0.1, 0.0, {2.0, 0.0}, 1.0, cfg);
  CHECK(b.std_fallback);
  CHECK(b.mu_pi == doctest::Approx(2.0 * 0.1 + 1.0));

  cfg.rho = RhoConvention::swapped;
  b = scale_belief(0.1, 0.5, {2.0, 3.0}, 0.0, cfg);
  CHECK(b.mu_pi == doctest::Approx(3.0 * 0.1 + 2.0));
  CHECK(b.var_pi == doctest::Approx(9.0 * 0.5));
}

TEST_CASE("product of Gaussians matches the numerical pdf product") {
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double m1 = rng.uniform(-5.0, 5.0), m2 = rng.uniform(-5.0, 5.0);
    const double v1_ = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const double v2_ = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const GaussianMoments g = product_of_gaussians(m1, v1_, m2, v2_);
    const auto [mean, var] = oracle_ref::numeric_gaussian_product(m1, v1_, m2, v2_);
    worst = std::max({worst, std::abs(g.mean - mean), std::abs(g.var - var)});
  }
  CHECK(worst <= 1e-10);
  const GaussianMoments same = product_of_gaussians(1.3, 0.8, 1.3, 0.8);
  CHECK(same.mean == doctest::Approx(1.3));
  CHECK(same.var == doctest::Approx(0.4));
}

TEST_CASE("coexbo_af reduces to ucb under an uninformative belief") {
  const GPModel gp = toy_gp_1d();
  const SoftCopeland sc = fixtures::flat_belief(gp.domain());
  AcqConfig cfg;
  cfg.gamma = 1e12;
  const RawYStats stats = raw_y_stats(gp.data().y);
  double lo = 1e300, hi = -1e300, gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec x = v1(i / 99.0);
    const double u = ucb(gp, x, cfg.beta_sqrt);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    gap = std::max(gap, std::abs(coexbo_af(gp, sc, x, cfg, stats) - u));
  }
  CHECK(gap <= 1e-5 * (hi - lo));
}

TEST_CASE("lower belief variance pulls the combined mean toward the belief") {
  double prev = 1e300;
  for (double cop_var : {1.0, 0.5, 0.1, 0.01}) {
    AcqConfig cfg;
    const ScaledBelief b = scale_belief(0.9, cop_var, {1.0, 1.0}, 0.5, cfg);
    const GaussianMoments m = product_of_gaussians(b.mu_pi, b.var_pi, -1.0, 0.5);
    const double dist = std::abs(m.mean - b.mu_pi);
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("pibo_af properties") {
  const GPModel gp = toy_gp_1d();
  const SoftCopeland flat = fixtures::flat_belief(gp.domain());
  const Vec x = v1(0.4);
  const double c = copeland_mean(flat, x);
  CHECK(pibo_af(gp, flat, x, 10.0, 1, 2.0) == doctest::Approx(ucb(gp, x, 2.0) * std::pow(c, 10.0)));
  CHECK(pibo_af(gp, flat, x, 10.0, 1000000000, 2.0) ==
        doctest::Approx(ucb(gp, x, 2.0)).epsilon(1e-8));
  const Vec a = maximize_af([&](const Vec& z) { return pibo_af(gp, flat, z, 10.0, 3, 2.0); }, gp.domain(), 4);
  const Vec b = maximize_af([&](const Vec& z) { return ucb(gp, z, 2.0); }, gp.domain(), 4);
  CHECK(std::abs(a[0] - b[0]) <= 1e-6);
}

TEST_CASE("maximize_af finds known maxima") {
  const Domain dom(Vec::Constant(3, -2.0), Vec::Constant(3, 3.0));
  Vec target(3);
  target << 0.7, -1.1, 2.2;
  const Vec got = maximize_af([&](const Vec& x) { return -(x - target).squaredNorm(); }, dom, 1);
  CHECK((got - target).norm() <= 1e-3 * (dom.upper() - dom.lower()).norm());
  const Vec flat = maximize_af([](const Vec&) { return 1.0; }, dom, 1);
  CHECK(dom.contains(flat));
  CHECK(maximize_af([&](const Vec& x) { return -(x - target).squaredNorm(); }, dom, 9) ==
        maximize_af([&](const Vec& x) { return -(x - target).squaredNorm(); }, dom, 9));

  const GPModel gp = toy_gp_1d();
  auto af = [&](const Vec& x) { return ucb(gp, x, 2.0); };
  double grid_best = -1e300;
  for (int i = 0; i < 10000; ++i) grid_best = std::max(grid_best, af(v1(i / 9999.0)));
  const double found = af(maximize_af(af, gp.domain(), 3));
  CHECK(found >= grid_best - 1e-4 * std::abs(grid_best));
}

TEST_CASE("generate_pair limits and separation") {
  const GPModel gp = toy_gp_1d();
  const RawYStats stats = raw_y_stats(gp.data().y);
  AcqConfig cfg;
  cfg.gamma = 1e12;
  const CandidatePair same = generate_pair(gp, fixtures::flat_belief(gp.domain()), cfg, stats, 2);
  CHECK(std::abs(same.x1[0] - same.x2[0]) <= 1e-4);

  auto util = [](const Vec& x) { return -std::abs(x[0] - 0.75); };
  const SoftCopeland sc = fixtures::learned_belief(gp.domain(), 120, util, 7);
  AcqConfig late;
  late.gamma = 0.01;
  late.t = 1000;
  const CandidatePair p = generate_pair(gp, sc, late, stats, 2);
  const double a1 = ucb(gp, p.x1, late.beta_sqrt);
  const double a2 = ucb(gp, p.x2, late.beta_sqrt);
  CHECK(std::abs(a1 - a2) <= 1e-3 * std::abs(a1));
}

TEST_CASE("generate_pair separates UCB and belief maxima") {
  // Data on the left; UCB is largest at the unexplored right edge while the
  // belief peaks at 0.75.
  const Domain dom(v1(0.0), v1(1.0));
  Dataset data;
  data.X.resize(3, 1);
  data.X << 0.1, 0.2, 0.45;
  data.y.resize(3);
  data.y << 5.5, 6.0, 5.0;
  const auto [m, s] = standardization(data.y);
  const GPModel gp(dom, data, KernelParams{1.0, v1(0.25), 1e-3, 0.0}, m, s);
  auto util = [](const Vec& x) { return -std::abs(x[0] - 0.75); };
  const SoftCopeland sc = fixtures::learned_belief(dom, 120, util, 7);
  const RawYStats stats = raw_y_stats(data.y);
  AcqConfig cfg;
  cfg.rho = RhoConvention::swapped;
  double best_u = -1e300, best_c = -1e300, arg_u = 0, arg_c = 0;
  for (int i = 0; i <= 2000; ++i) {
    const Vec x = v1(i / 2000.0);
    const double u = ucb(gp, x, cfg.beta_sqrt);
    const double c = coexbo_af(gp, sc, x, cfg, stats);
    if (u > best_u) best_u = u, arg_u = x[0];
    if (c > best_c) best_c = c, arg_c = x[0];
  }
  const CandidatePair q = generate_pair(gp, sc, cfg, stats, 2);
  CHECK(arg_u > 0.95);
  CHECK(std::abs(arg_c - 0.75) < 0.1);
  CHECK(std::abs(q.x1[0] - arg_u) < 0.005);
  CHECK(std::abs(q.x2[0] - arg_c) < 0.005);
}

TEST_CASE("thompson_candidate") {
  KernelParams p;
  p.outputscale = 1.0;
  p.lengthscales = v1(0.2);
  const GPModel prior = GPModel::prior(Domain::unit(1), p);
  CHECK(thompson_candidate(prior, 3) == thompson_candidate(prior, 3));

  // Near-noiseless dense data: draws hug the posterior mean.
  const Domain dom = Domain::unit(1);
  Dataset data;
  data.X = sobol_points(40, 1);
  data.y.resize(40);
  for (int i = 0; i < 40; ++i) data.y[i] = -std::pow(data.X(i, 0) - 0.6, 2);
  GPModel tight(dom, data, KernelParams{1.0, v1(0.3), 1e-6, 0.0}, 0.0, 1.0);
  CHECK(std::abs(thompson_candidate(tight, 1)[0] - 0.6) < 0.03);

  // Two equal bumps at 0.2 and 0.8: both must be selected sometimes.
  Dataset bi;
  bi.X.resize(6, 1);
  bi.X << 0.0, 0.2, 0.4, 0.6, 0.8, 1.0;
  bi.y.resize(6);
  bi.y << 0.0, 1.0, 0.0, 0.0, 1.0, 0.0;
  GPModel bimodal(dom, bi, KernelParams{1.0, v1(0.08), 1e-2, 0.0}, 0.0, 1.0);
  int left = 0, right = 0;
  for (int s = 0; s < 1000; ++s) {
    const double x = thompson_candidate(bimodal, s, 128)[0];
    left += x < 0.4;
    right += x > 0.6;
  }
  CHECK(left > 0);
  CHECK(right > 0);
}

TEST_CASE("regret ratio diagnostics") {
  CHECK(std::abs(regret_ratio(0.0, 1.0, 1.0) - std::sqrt(0.5)) <= 1e-12);
  CHECK(regret_ratio(0.0, 1.0, 1e-12) > 0.999999);
  CHECK(regret_ratio(0.0, 1.0, 1e-12) < 1.0);
  CHECK_THROWS_AS(regret_ratio(0.0, 1.0, 0.0), InputError);
  CHECK(finite_domain_beta(50, 1, 0.1) == doctest::Approx(2.0 * std::log(50 * M_PI * M_PI / 6.0 / 0.1)));

  const GPModel gp = toy_gp_1d();
  const SoftCopeland sc = fixtures::flat_belief(gp.domain());
  AcqConfig cfg;
  cfg.t = 5;
  const RawYStats stats = raw_y_stats(gp.data().y);
  const RegretDiagnostics d = regret_ratio_bound(gp, sc, v1(0.9), v1(0.3), cfg, stats);
  CHECK(d.r_ratio_bound > 0.0);
  CHECK(d.r_ratio_bound < 1.0);
  CHECK(d.delta_mu >= 0.0);
}

TEST_CASE("belief influence decays monotonically in t") {
  const GPModel gp = toy_gp_1d();
  auto util = [](const Vec& x) { return -std::abs(x[0] - 0.3); };
  const SoftCopeland sc = fixtures::learned_belief(gp.domain(), 80, util, 3);
  const RawYStats stats = raw_y_stats(gp.data().y);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 100; ++i) {
    const double u = ucb(gp, v1(i / 99.0), 2.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  double prev = 1e300;
  for (int t : {1, 10, 100, 1000}) {
    AcqConfig cfg;
    cfg.t = t;
    double sup = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec x = v1(i / 99.0);
      sup = std::max(sup, std::abs(coexbo_af(gp, sc, x, cfg, stats) - ucb(gp, x, 2.0)));
    }
    CHECK(sup <= prev);
    prev = sup;
  }
  CHECK(prev <= 1e-3 * (hi - lo));
}
