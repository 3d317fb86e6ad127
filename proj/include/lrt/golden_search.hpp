#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

// Derivative-free 1-D maximization: golden-section refinement, plus a
// multi-start wrapper for objectives with several local maxima (quantile
// seeds, local window per seed, best result wins).

namespace lrt {

struct ScalarMax {
  double x = 0.0;
  double fx = 0.0;
  bool converged = false;
  int evals = 0;
};

template <typename F>
ScalarMax maximize_golden(F&& f, double lo, double hi, double xtol = 1e-10,
                          int max_iter = 240) {
  constexpr double ratio = 0.6180339887498949;  // 1/phi
  ScalarMax out;
  if (!(lo <= hi)) std::swap(lo, hi);

  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  out.evals = 2;

  int it = 0;
  while (it < max_iter && (hi - lo) > xtol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
    ++out.evals;
    ++it;
  }

  if (f1 >= f2) {
    out.x = x1;
    out.fx = f1;
  } else {
    out.x = x2;
    out.fx = f2;
  }
  out.converged = it < max_iter;
  return out;
}

// Golden search in the window around each seed (bounded by its neighbors),
// returning the best local result. Seeds are sorted and deduplicated.
template <typename F>
ScalarMax maximize_multistart(F&& f, std::vector<double> seeds, double pad,
                              double xtol = 1e-10) {
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <=
                                   1e-12 * (1.0 + std::abs(a) + std::abs(b));
                          }),
              seeds.end());

  ScalarMax best;
  bool have = false;
  int total_evals = 0;
  const std::size_t k = seeds.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double lo = (i == 0) ? seeds[0] - pad : seeds[i - 1];
    const double hi = (i + 1 == k) ? seeds[k - 1] + pad : seeds[i + 1];
    const ScalarMax r = maximize_golden(f, lo, hi, xtol);
    total_evals += r.evals;
    if (!have || r.fx > best.fx) {
      best = r;
      have = true;
    }
  }
  best.evals = total_evals;
  return best;
}

}  // namespace lrt
