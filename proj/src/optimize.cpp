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

#include "coexbo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

namespace coexbo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Projected gradient of the minimization objective: components that point out
// of the box at an active bound are zeroed.
Vec projected_gradient(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi) {
  Vec pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
  }
  return pg;
}

}  // namespace

BoxOptResult maximize_box_lbfgs(const ValueAndGradient& f, const Vec& x0, const Vec& lower,
                                const Vec& upper, int max_iters, double gtol,
                                double ftol) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) throw InputError("maximize_box_lbfgs: bound size mismatch");
  constexpr int kMemory = 8;

  BoxOptResult out;
  // Minimize h = -f internally.
  auto eval = [&](const Vec& x, Vec& g) {
    ++out.evaluations;
    Vec grad(n);
    const double value = f(x, &grad);
    if (!std::isfinite(value) || !grad.allFinite()) {
      g = Vec::Zero(n);
      return kInf;
    }
    g = -grad;
    return -value;
  };

  Vec x = x0.cwiseMax(lower).cwiseMin(upper);
  Vec g;
  double h = eval(x, g);
  if (!std::isfinite(h)) {
    out.x = x;
    out.value = -kInf;
    return out;
  }

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < max_iters; ++iter) {
    out.iterations = iter + 1;
    Vec pg = projected_gradient(x, g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() < gtol) break;

    // Two-loop recursion on the free variables.
    Vec q = pg;
    std::vector<double> a(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      a[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= a[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double b = rho_hist[k] * y_hist[k].dot(q);
      q += s_hist[k] * (a[k] - b);
    }
    Vec d = -q;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pg[i] == 0.0 && g[i] != 0.0) d[i] = 0.0;
    }
    if (d.dot(pg) >= 0.0) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -pg;
    }
    double step = 1.0;
    if (s_hist.empty()) step = std::min(1.0, 1.0 / std::max(d.lpNorm<Eigen::Infinity>(), 1e-12));

    Vec x_new, g_new;
    double h_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      x_new = (x + step * d).cwiseMax(lower).cwiseMin(upper);
      h_new = eval(x_new, g_new);
      if (std::isfinite(h_new) && h_new <= h + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      break;
    }

    const Vec s = x_new - x;
    const Vec yv = g_new - g;
    const double sy = s.dot(yv);
    const double rel_change = std::abs(h - h_new) / std::max({std::abs(h), std::abs(h_new), 1.0});
    x = x_new;
    g = g_new;
    h = h_new;
    if (sy > 1e-12 * s.squaredNorm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (rel_change < ftol || s.lpNorm<Eigen::Infinity>() < 1e-12) break;
  }
  out.x = x;
  out.value = -h;
  return out;
}

BoxOptResult nelder_mead_maximize(const std::function<double(const Vec&)>& f, const Vec& x0,
                                  const Vec& lower, const Vec& upper, const Vec& initial_step,
                                  int max_evals) {
  const Eigen::Index n = x0.size();
  BoxOptResult out;
  auto value_at = [&](Vec& x) {
    x = x.cwiseMax(lower).cwiseMin(upper);
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : -kInf;
  };

  std::vector<Vec> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = value_at(simplex[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec v = simplex[0];
    // Step inward when the start sits on the upper bound.
    v[i] += (v[i] + initial_step[i] <= upper[i]) ? initial_step[i] : -initial_step[i];
    simplex[i + 1] = v;
    values[i + 1] = value_at(simplex[i + 1]);
  }

  std::vector<int> order(n + 1);
  while (out.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    // Best first; stable so that earlier vertices win ties.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1 >= 0 ? n - 1 : 0];

    double spread = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) {
      spread = std::max(spread, (simplex[order[i]] - simplex[best]).lpNorm<Eigen::Infinity>());
    }
    if (spread < 1e-12) break;

    Vec centroid = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(n);

    Vec reflected = centroid + (centroid - simplex[worst]);
    const double fr = value_at(reflected);
    if (fr > values[best]) {
      Vec expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = out.evaluations < max_evals ? value_at(expanded) : -kInf;
      if (fe > fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr > values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr > values[worst];
    Vec contracted = outside ? Vec(centroid + 0.5 * (reflected - centroid))
                             : Vec(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = value_at(contracted);
    if (fc > std::max(outside ? fr : values[worst], values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (Eigen::Index i = 1; i <= n && out.evaluations < max_evals; ++i) {
      const int k = order[i];
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = value_at(simplex[k]);
    }
  }

  int best = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  out.x = simplex[best];
  out.value = values[best];
  return out;
}

}  // namespace coexbo
