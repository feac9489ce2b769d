#include "coexbo/gp.hpp"
#include "coexbo/random.hpp"
#include "coexbo/sobol.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace coexbo;

namespace {

Dataset random_dataset(const Domain& dom, int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.X.resize(n, dom.dim());
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec x = rng.uniform_in(dom);
    data.X.row(i) = x.transpose();
    data.y[i] = std::sin(3.0 * x.sum()) + 0.5 * x.squaredNorm() + 0.05 * rng.normal();
  }
  return data;
}

KernelParams params_for(int d, double v, double l, double noise, double c = 0.0) {
  KernelParams p;
  p.outputscale = v;
  p.lengthscales = Vec::Constant(d, l);
  p.noise = noise;
  p.constant_mean = c;
  return p;
}

}  // namespace

TEST_CASE("rbf_kernel values") {
  KernelParams p = params_for(1, 2.5, 0.7, 1e-3);
  Vec a(1), b(1);
  a << 0.3;
  CHECK(rbf_kernel(a, a, p) == doctest::Approx(2.5).epsilon(1e-15));
  p.outputscale = 1.0;
  p.lengthscales[0] = 1.0;
  a << 0.0;
  b << 1.0;
  CHECK(rbf_kernel(a, b, p) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

  Rng rng(7);
  KernelParams q = params_for(3, 1.3, 0.4, 1e-3);
  q.lengthscales << 0.2, 0.9, 1.7;
  for (int i = 0; i < 100; ++i) {
    const Vec x = rng.standard_normal(3);
    const Vec y = rng.standard_normal(3);
    CHECK(std::abs(rbf_kernel(x, y, q) - rbf_kernel(y, x, q)) <= 1e-15);
  }
  CHECK_THROWS_AS(rbf_kernel(Vec::Zero(2), Vec::Zero(3), q), InputError);
}

TEST_CASE("prior model and empty conditioning") {
  const Domain dom = Domain::unit(2);
  const GPModel gp = GPModel::prior(dom, params_for(2, 1.7, 0.3, 1e-2, 0.4));
  const Prediction pr = posterior(gp, Vec::Constant(2, 0.5));
  CHECK(pr.mean == doctest::Approx(0.4));
  CHECK(pr.variance == doctest::Approx(1.7));
  const Mat X = sobol_points(5, 2);
  const Mat C = posterior_cov(gp, X, X);
  const Mat K = rbf_gram(X, X, 1.7, Vec::Constant(2, 0.3));
  CHECK((C - K).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sample_posterior(gp, X, 0, 3).rows() == 0);
}

TEST_CASE("posterior matches explicit dense inverse") {
  const Domain dom(Vec::Constant(3, -2.0), Vec::Constant(3, 3.0));
  const Dataset data = random_dataset(dom, 20, 11);
  const GPModel gp = fit_gp(data, dom, 5);
  Rng rng(99);
  double worst = 0.0;
  for (int q = 0; q < 50; ++q) {
    const Vec x = rng.uniform_in(dom);
    const Prediction p = posterior(gp, x);
    const auto [m, v] = oracle_ref::dense_posterior(gp, x);
    worst = std::max(worst, std::abs(p.mean - m) / std::max(1.0, std::abs(m)));
    worst = std::max(worst, std::abs(p.variance - v) / std::max(1e-3, std::abs(v)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("cholesky reconstructs the regularized Gram matrix") {
  const Domain dom = Domain::unit(2);
  const GPModel gp = fit_gp(random_dataset(dom, 15, 3), dom, 1);
  Mat K = rbf_gram(gp.unit_inputs(), gp.unit_inputs(), gp.params().outputscale,
                   gp.params().lengthscales);
  K.diagonal().array() += gp.params().noise + gp.jitter();
  const Mat R = gp.chol() * gp.chol().transpose();
  CHECK((R - K).norm() / K.norm() <= 1e-8);
}

TEST_CASE("fit_gp interpolates two points and is deterministic") {
  const Domain dom = Domain::unit(1);
  Dataset data;
  data.X.resize(2, 1);
  data.X << 0.2, 0.8;
  data.y.resize(2);
  data.y << 1.0, -1.0;
  const GPModel gp = fit_gp(data, dom, 4);
  CHECK(posterior(gp, data.X.row(0).transpose()).mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(posterior(gp, data.X.row(1).transpose()).mean == doctest::Approx(-1.0).epsilon(0.05));

  const Dataset big = random_dataset(Domain::unit(2), 12, 8);
  const GPModel a = fit_gp(big, Domain::unit(2), 42);
  const GPModel b = fit_gp(big, Domain::unit(2), 42);
  CHECK(a.params().outputscale == b.params().outputscale);
  CHECK(a.params().lengthscales == b.params().lengthscales);
  CHECK(a.params().noise == b.params().noise);
  CHECK(a.params().constant_mean == b.params().constant_mean);
  CHECK_THROWS_AS(fit_gp(Dataset{Mat(1, 2), Vec::Zero(1)}, Domain::unit(2), 1), InputError);
}

TEST_CASE("fitted hyperparameters are a stationary point of the LML") {
  const Domain dom = Domain::unit(2);
  const Dataset data = random_dataset(dom, 10, 21);
  const double h = 1e-5;
  // Interior log-lengthscales must have a vanishing central difference.
  const GPModel gp = fit_gp(data, dom, 3);
  KernelParams opt = gp.params();
  for (int k = 0; k < 2; ++k) {
    const double l = opt.lengthscales[k];
    if (l <= GPBounds::min_lengthscale * 1.01 || l >= GPBounds::max_lengthscale * 0.99) continue;
    KernelParams a = opt, b = opt;
    const Mat U = gp.unit_inputs();
    const Vec ysf = (data.y.array() - gp.y_mean()) / gp.y_std();
    a.lengthscales[k] = l * std::exp(h);
    b.lengthscales[k] = l * std::exp(-h);
    const double g = (log_marginal_likelihood(U, ysf, a) - log_marginal_likelihood(U, ysf, b)) / (2 * h);
    CHECK(std::abs(g) < 1e-3);
  }
}

TEST_CASE("lengthscale recovery from a known GP draw") {
  const Domain dom = Domain::unit(1);
  const double true_l = 0.15;
  int recovered = 0;
  for (int rep = 0; rep < 5; ++rep) {
    Dataset data;
    data.X = sobol_points(20, 1, 100 + rep);
    const GPModel prior = GPModel::prior(dom, params_for(1, 1.0, true_l, 1e-4));
    const Mat draw = sample_posterior(prior, data.X, 1, 500 + rep);
    data.y = draw.row(0).transpose();
    const GPModel gp = fit_gp(data, dom, rep);
    const double l = gp.params().lengthscales[0];
    if (l > true_l / 3.0 && l < true_l * 3.0) ++recovered;
  }
  CHECK(recovered >= 4);
}

TEST_CASE("posterior covariance is symmetric PSD and consistent") {
  const Domain dom = Domain::unit(3);
  const GPModel gp = fit_gp(random_dataset(dom, 18, 5), dom, 2);
  Rng rng(17);
  Mat X(25, 3);
  for (int i = 0; i < 25; ++i) X.row(i) = rng.uniform_in(dom).transpose();
  const Mat C = posterior_cov(gp, X, X);
  CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(C);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  const Vec x = X.row(3).transpose();
  const Mat c1 = posterior_cov(gp, x.transpose(), x.transpose());
  CHECK(c1(0, 0) == doctest::Approx(posterior(gp, x).variance).epsilon(1e-10));
}

TEST_CASE("sample_posterior Monte Carlo consistency") {
  const Domain dom = Domain::unit(1);
  const GPModel gp = fit_gp(random_dataset(dom, 8, 13), dom, 1);
  Mat X(3, 1);
  X << 0.1, 0.45, 0.9;
  const int n = 10000;
  const Mat S = sample_posterior(gp, X, n, 77);
  CHECK(S == sample_posterior(gp, X, n, 77));
  const Vec mean = S.colwise().mean().transpose();
  const Mat centred = S.rowwise() - mean.transpose();
  const Mat emp = centred.transpose() * centred / (n - 1);
  const Mat C = posterior_cov(gp, X, X);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(emp(i, i) - C(i, i)) <= 0.05 * C(i, i));
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(emp(i, j) - C(i, j)) <= 0.05 * std::sqrt(C(i, i) * C(j, j)));
    }
  }
}

TEST_CASE("conditioning never increases variance") {
  const Domain dom = Domain::unit(2);
  const GPModel gp = fit_gp(random_dataset(dom, 10, 31), dom, 6);
  Vec xn(2);
  xn << 0.37, 0.61;
  const GPModel more = condition_on(gp, xn, 0.3);
  CHECK(more.size() == gp.size() + 1);
  const Mat G = sobol_points(256, 2);
  for (int i = 0; i < G.rows(); ++i) {
    const Vec x = G.row(i).transpose();
    CHECK(posterior(more, x).variance <= posterior(gp, x).variance + 1e-8);
  }
}

TEST_CASE("standardization round trip") {
  const Domain dom = Domain::unit(1);
  const GPModel gp = fit_gp(random_dataset(dom, 6, 2), dom, 0);
  for (double y : {-3.2, 0.0, 1e-3, 17.5}) {
    CHECK(std::abs(gp.destandardize(gp.standardize(y)) - y) <= 1e-12);
  }
  Vec constant = Vec::Constant(4, 2.0);
  CHECK(standardization(constant).second == 1.0);
}

TEST_CASE("robust_cholesky escalates jitter and reports failure") {
  Mat A = Mat::Ones(4, 4);
  const CholeskyFactor f = robust_cholesky(A, "test");
  CHECK(f.jitter > 0.0);
  Mat bad = -Mat::Identity(3, 3);
  CHECK_THROWS_AS(robust_cholesky(bad, "test"), NumericalError);
}
