#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lrt/density.hpp"
#include "lrt/region1d.hpp"

// Exact finite oracles: cell discretizations of the continuous problems, the
// discrete Neyman-Pearson construction, and exhaustive search over invariant
// cell unions. Alphas in oracle scenarios are chosen to be exactly
// attainable by cell unions, so no randomization is needed.
//
// Cells are indexed from 0. In 1-D, cell i covers (i/m, (i+1)/m) and the
// reflection pairs cell i with cell m-1-i.

namespace lrt {

struct DiscreteProblem {
  int m = 0;                               // number of cells
  std::vector<double> p0;                  // null cell masses
  std::vector<std::vector<double>> alts;   // one mass vector per alternative
  std::vector<std::vector<int>> orbits;    // symmetry blocks of cells
};

namespace detail {

inline void check_prob_vector(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument(std::string(what) + ": negative cell mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(what) + ": cell masses must sum to 1");
}

inline std::vector<double> shape_cells(const Shape1D& shape, int m) {
  std::vector<double> cells(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double lo = static_cast<double>(i) / m;
    const double hi = static_cast<double>(i + 1) / m;
    cells[static_cast<std::size_t>(i)] =
        exact_power_n1(shape, Region1D{{{lo, hi}}});
  }
  return cells;
}

}  // namespace detail

// Symmetric pair on (0,1): uniform null, p1 from the shape CDF, p2 mirrored.
inline DiscreteProblem discretize(const SymmetricPair& pair, int m) {
  if (m % 2 != 0) throw std::invalid_argument("discretize: m must be even");
  if (m < 2 || m > 64) throw std::invalid_argument("discretize: need 2 <= m <= 64");

  DiscreteProblem dp;
  dp.m = m;
  dp.p0.assign(static_cast<std::size_t>(m), 1.0 / m);
  std::vector<double> p1 = detail::shape_cells(pair.shape, m);
  std::vector<double> p2(p1.rbegin(), p1.rend());
  detail::check_prob_vector(p1, "discretize p1");
  dp.alts.push_back(std::move(p1));
  dp.alts.push_back(std::move(p2));
  for (int i = 0; i < m / 2; ++i) dp.orbits.push_back({i, m - 1 - i});
  return dp;
}

// Single alternative, no symmetry: singleton orbits (the s=1 reduction where
// the invariant search must coincide with the Neyman-Pearson region).
inline DiscreteProblem discretize_single(const Shape1D& shape, int m) {
  if (m < 1 || m > 64) throw std::invalid_argument("discretize_single: need 1 <= m <= 64");
  DiscreteProblem dp;
  dp.m = m;
  dp.p0.assign(static_cast<std::size_t>(m), 1.0 / m);
  std::vector<double> p1 = detail::shape_cells(shape, m);
  detail::check_prob_vector(p1, "discretize p1");
  dp.alts.push_back(std::move(p1));
  for (int i = 0; i < m; ++i) dp.orbits.push_back({i});
  return dp;
}

// Bivariate problem on an m x m grid; orbits are the quadruples induced by
// the four reflections. Cell (i,j) has flat index i*m + j.
inline DiscreteProblem discretize(const QuadAlternatives& quad, int m) {
  if (m % 2 != 0) throw std::invalid_argument("discretize: m must be even");
  if (m < 2 || m > 16) throw std::invalid_argument("discretize: need 2 <= m <= 16");

  const std::vector<double> cx = detail::shape_cells(quad.fx, m);
  const std::vector<double> cy = detail::shape_cells(quad.fy, m);

  DiscreteProblem dp;
  dp.m = m * m;
  dp.p0.assign(static_cast<std::size_t>(m * m), 1.0 / (m * m));
  auto product = [&](bool flip_x, bool flip_y) {
    std::vector<double> cells(static_cast<std::size_t>(m * m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double a = cx[static_cast<std::size_t>(flip_x ? m - 1 - i : i)];
        const double b = cy[static_cast<std::size_t>(flip_y ? m - 1 - j : j)];
        cells[static_cast<std::size_t>(i * m + j)] = a * b;
      }
    return cells;
  };
  dp.alts.push_back(product(false, false));
  dp.alts.push_back(product(true, false));
  dp.alts.push_back(product(false, true));
  dp.alts.push_back(product(true, true));

  for (int i = 0; i < m / 2; ++i)
    for (int j = 0; j < m / 2; ++j)
      dp.orbits.push_back({i * m + j, (m - 1 - i) * m + j, i * m + (m - 1 - j),
                           (m - 1 - i) * m + (m - 1 - j)});
  return dp;
}

struct DiscreteRegion {
  std::vector<int> cells;  // ascending
  double null_mass = 0.0;
  double power = 0.0;  // against p1
};

// Discrete Neyman-Pearson region: cells sorted by likelihood ratio
// descending (ties by index), included as a prefix while the null mass stays
// within alpha. Non-randomized; alphas attainable by cell unions make the
// prefix exactly optimal.
inline DiscreteRegion np_region_discrete(std::span<const double> p0_cells,
                                         std::span<const double> p1_cells,
                                         double alpha) {
  if (p0_cells.size() != p1_cells.size())
    throw std::invalid_argument("np_region_discrete: vector length mismatch");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("np_region_discrete: alpha must be in (0,1)");
  detail::check_prob_vector(p0_cells, "np p0");
  detail::check_prob_vector(p1_cells, "np p1");

  const std::size_t m = p0_cells.size();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto ratio = [&](int i) {
    const double den = p0_cells[static_cast<std::size_t>(i)];
    const double num = p1_cells[static_cast<std::size_t>(i)];
    if (den == 0.0) return num > 0.0 ? kPosInf : 0.0;
    return num / den;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = ratio(a), rb = ratio(b);
    if (ra != rb) return ra > rb;
    return a < b;
  });

  DiscreteRegion out;
  for (int idx : order) {
    const double mass = p0_cells[static_cast<std::size_t>(idx)];
    if (out.null_mass + mass > alpha + 1e-12) break;
    out.cells.push_back(idx);
    out.null_mass += mass;
    out.power += p1_cells[static_cast<std::size_t>(idx)];
  }
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

struct InvariantSearch {
  DiscreteRegion best;                  // maximizer of power against p1
  std::vector<double> per_alt_power;    // equal across alternatives by invariance
  bool avg_ordered_is_maximal = false;  // greedy-by-average-ratio region attains the max
  bool used_greedy = false;
};

// Exhaustively enumerates invariant cell unions (unions of orbits) with null
// mass <= alpha and returns a maximizer of the power against p1. With more
// than 24 orbits enumeration is refused unless allow_greedy, in which case
// the greedy-by-ratio region is returned and flagged.
inline InvariantSearch best_invariant_region(const DiscreteProblem& dp,
                                             double alpha,
                                             bool allow_greedy = false) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("best_invariant_region: alpha must be in (0,1)");
  detail::check_prob_vector(dp.p0, "p0");
  for (const auto& a : dp.alts) detail::check_prob_vector(a, "alt");
  if (dp.alts.empty()) throw std::invalid_argument("best_invariant_region: no alternatives");

  const std::size_t nb = dp.orbits.size();
  const std::size_t s = dp.alts.size();

  // per-orbit masses
  std::vector<double> b0(nb, 0.0), bmix(nb, 0.0);
  std::vector<std::vector<double>> balt(s, std::vector<double>(nb, 0.0));
  for (std::size_t k = 0; k < nb; ++k)
    for (int cell : dp.orbits[k]) {
      b0[k] += dp.p0[static_cast<std::size_t>(cell)];
      for (std::size_t a = 0; a < s; ++a)
        balt[a][k] += dp.alts[a][static_cast<std::size_t>(cell)];
    }
  for (std::size_t k = 0; k < nb; ++k) {
    for (std::size_t a = 0; a < s; ++a) bmix[k] += balt[a][k];
    bmix[k] /= static_cast<double>(s);
  }

  auto region_from_blocks = [&](const std::vector<char>& sel) {
    DiscreteRegion r;
    for (std::size_t k = 0; k < nb; ++k)
      if (sel[k]) {
        r.null_mass += b0[k];
        r.power += balt[0][k];
        for (int cell : dp.orbits[k]) r.cells.push_back(cell);
      }
    std::sort(r.cells.begin(), r.cells.end());
    return r;
  };

  // greedy by mixture/null ratio (the average-LR ordering of blocks)
  std::vector<int> order(nb);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = b0[static_cast<std::size_t>(a)] == 0.0
                          ? kPosInf
                          : bmix[static_cast<std::size_t>(a)] / b0[static_cast<std::size_t>(a)];
    const double rb = b0[static_cast<std::size_t>(b)] == 0.0
                          ? kPosInf
                          : bmix[static_cast<std::size_t>(b)] / b0[static_cast<std::size_t>(b)];
    if (ra != rb) return ra > rb;
    return a < b;
  });
  std::vector<char> greedy_sel(nb, 0);
  double greedy_mass = 0.0;
  for (int k : order) {
    if (greedy_mass + b0[static_cast<std::size_t>(k)] > alpha + 1e-12) break;
    greedy_sel[static_cast<std::size_t>(k)] = 1;
    greedy_mass += b0[static_cast<std::size_t>(k)];
  }

  InvariantSearch out;
  if (nb > 24) {
    if (!allow_greedy)
      throw std::invalid_argument(
          "best_invariant_region: too many symmetry blocks for enumeration "
          "(pass allow_greedy to accept the ratio-greedy region)");
    out.best = region_from_blocks(greedy_sel);
    out.used_greedy = true;
    out.avg_ordered_is_maximal = true;  // by construction of the fallback
  } else {
    std::vector<char> best_sel(nb, 0), sel(nb, 0);
    double best_power = -1.0, best_mass = 2.0;
    for (std::uint64_t mask = 0; mask < (1ull << nb); ++mask) {
      double mass = 0.0, power = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        sel[k] = static_cast<char>((mask >> k) & 1ull);
        if (sel[k]) {
          mass += b0[k];
          power += balt[0][k];
        }
      }
      if (mass > alpha + 1e-12) continue;
      if (power > best_power + 1e-15 ||
          (std::abs(power - best_power) <= 1e-15 && mass < best_mass - 1e-15)) {
        best_sel = sel;
        best_power = power;
        best_mass = mass;
      }
    }
    out.best = region_from_blocks(best_sel);
    const DiscreteRegion greedy = region_from_blocks(greedy_sel);
    out.avg_ordered_is_maximal = greedy.power >= out.best.power - 1e-12;
  }

  out.per_alt_power.assign(s, 0.0);
  for (std::size_t a = 0; a < s; ++a)
    for (int cell : out.best.cells)
      out.per_alt_power[a] += dp.alts[a][static_cast<std::size_t>(cell)];
  return out;
}

}  // namespace lrt
