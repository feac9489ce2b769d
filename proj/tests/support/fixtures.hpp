// Small model builders shared by the tests.
#pragma once

#include "coexbo/gp.hpp"
#include "coexbo/preference.hpp"
#include "coexbo/random.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace coexbo::fixtures {

inline Dataset sample_dataset(const Domain& dom, int n, const std::function<double(const Vec&)>& f,
                              std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.X.resize(n, dom.dim());
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec x = rng.uniform_in(dom);
    data.X.row(i) = x.transpose();
    data.y[i] = f(x);
  }
  return data;
}

// Noise-free duels between uniform random points under utility f.
inline std::vector<DuelRecord> utility_duels(const Domain& dom, int count,
                                             const std::function<double(const Vec&)>& f,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DuelRecord> duels;
  for (int i = 0; i < count; ++i) {
    const Vec a = rng.uniform_in(dom);
    const Vec b = rng.uniform_in(dom);
    duels.push_back({a, b, f(a) > f(b) ? 1 : 0});
  }
  return duels;
}

// Belief whose surrogates are constant: the score is the same everywhere.
inline SoftCopeland flat_belief(const Domain& dom) {
  const int d = dom.dim();
  Mat nodes(2, 2 * d);
  nodes.row(0).setConstant(0.25);
  nodes.row(1).setConstant(0.75);
  const Vec y = Vec::Constant(2, 0.5);
  const BQParams p{0.1, 0.3, 1e-3};
  return SoftCopeland(dom, nodes, y, Vec::Constant(2, 0.25), p, p);
}

inline SoftCopeland learned_belief(const Domain& dom, int duels,
                                   const std::function<double(const Vec&)>& f, std::uint64_t seed) {
  const PreferenceGP g = fit_preference_gp(utility_duels(dom, duels, f, seed), dom, 0.01, seed);
  return build_soft_copeland(g, 256, seed);
}

}  // namespace coexbo::fixtures
