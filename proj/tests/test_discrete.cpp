#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lrt/discrete.hpp"
#include "lrt/families.hpp"

using Catch::Matchers::WithinAbs;
using namespace lrt;

namespace {

// brute-force oracle: best power over all cell unions with null mass <= alpha
double enumerate_best_power(std::span<const double> p0, std::span<const double> p1,
                            double alpha) {
  const std::size_t m = p0.size();
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double mass = 0.0, power = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1ull) {
        mass += p0[i];
        power += p1[i];
      }
    if (mass <= alpha + 1e-12) best = std::max(best, power);
  }
  return best;
}

}  // namespace

TEST_CASE("discretize the symmetric pairs", "[discrete]") {
  const auto uniform_pair = make_symmetric_pair(shape_convex_3x2(), 1);
  const auto dp = discretize(uniform_pair, 10);
  REQUIRE(dp.m == 10);
  for (double c : dp.p0) REQUIRE_THAT(c, WithinAbs(0.1, 1e-15));

  const auto dp2 = discretize(uniform_pair, 2);
  REQUIRE_THAT(dp2.alts[0][0], WithinAbs(0.125, 1e-12));
  REQUIRE_THAT(dp2.alts[0][1], WithinAbs(0.875, 1e-12));
  // p2 is the mirror
  REQUIRE_THAT(dp2.alts[1][0], WithinAbs(0.875, 1e-12));

  const auto dp4 = discretize(uniform_pair, 4);
  REQUIRE(dp4.orbits == std::vector<std::vector<int>>{{0, 3}, {1, 2}});

  REQUIRE_THROWS_AS(discretize(uniform_pair, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(discretize(uniform_pair, 66), std::invalid_argument);
}

TEST_CASE("np_region_discrete on the two-cell example", "[discrete]") {
  const std::vector<double> p0 = {0.5, 0.5};
  const std::vector<double> p1 = {0.9, 0.1};
  const auto r = np_region_discrete(p0, p1, 0.5);
  REQUIRE(r.cells == std::vector<int>{0});
  REQUIRE_THAT(r.power, WithinAbs(0.9, 1e-15));
  REQUIRE_THAT(r.null_mass, WithinAbs(0.5, 1e-15));
}

TEST_CASE("np_region_discrete ties break deterministically", "[discrete]") {
  const std::vector<double> p0 = {0.25, 0.25, 0.25, 0.25};
  const auto ra = np_region_discrete(p0, p0, 0.5);
  const auto rb = np_region_discrete(p0, p0, 0.5);
  REQUIRE(ra.cells == std::vector<int>{0, 1});
  REQUIRE(ra.cells == rb.cells);
}

TEST_CASE("np_region_discrete is optimal at attainable alphas", "[discrete]") {
  rng::Stream s(606, "np-prop");
  for (int rep = 0; rep < 50; ++rep) {
    rng::Sequence seq = s.at(static_cast<std::uint64_t>(rep));
    const std::size_t m = 12;
    std::vector<double> p0(m), p1(m);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      p0[i] = seq.exponential();
      p1[i] = seq.exponential();
      s0 += p0[i];
      s1 += p1[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      p0[i] /= s0;
      p1[i] /= s1;
    }
    // pick an attainable alpha: null mass of a ratio-ordered prefix
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return p1[static_cast<std::size_t>(a)] / p0[static_cast<std::size_t>(a)] >
             p1[static_cast<std::size_t>(b)] / p0[static_cast<std::size_t>(b)];
    });
    const int prefix = 1 + static_cast<int>(seq.next_u64() % (m - 2));
    double alpha = 0.0;
    for (int i = 0; i < prefix; ++i) alpha += p0[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    if (alpha >= 1.0) continue;

    const auto np = np_region_discrete(p0, p1, alpha);
    REQUIRE_THAT(np.power, WithinAbs(enumerate_best_power(p0, p1, alpha), 1e-12));
  }
}

TEST_CASE("best invariant region on the m=10 discretizations", "[discrete]") {
  const auto concave = discretize(make_symmetric_pair(shape_concave_sqrt(), 1), 10);
  const auto convex = discretize(make_symmetric_pair(shape_convex_3x2(), 1), 10);

  // concave: central block at alpha = 0.2, central two blocks at 0.4
  const auto c02 = best_invariant_region(concave, 0.2);
  REQUIRE(c02.best.cells == std::vector<int>{4, 5});
  const auto c04 = best_invariant_region(concave, 0.4);
  REQUIRE(c04.best.cells == std::vector<int>{3, 4, 5, 6});

  // convex: outermost blocks
  const auto v02 = best_invariant_region(convex, 0.2);
  REQUIRE(v02.best.cells == std::vector<int>{0, 9});
  const auto v04 = best_invariant_region(convex, 0.4);
  REQUIRE(v04.best.cells == std::vector<int>{0, 1, 8, 9});

  // invariance makes the power equal against p1 and p2
  for (const auto* r : {&c02, &c04, &v02, &v04}) {
    REQUIRE(r->per_alt_power.size() == 2);
    REQUIRE_THAT(r->per_alt_power[0], WithinAbs(r->per_alt_power[1], 1e-12));
    REQUIRE(r->avg_ordered_is_maximal);
  }
}

TEST_CASE("best invariant region equals NP on the mixture", "[discrete]") {
  for (const Shape1D& shape : {shape_concave_sqrt(), shape_convex_3x2()}) {
    const auto dp = discretize(make_symmetric_pair(shape, 1), 10);
    std::vector<double> mix(static_cast<std::size_t>(dp.m));
    for (int i = 0; i < dp.m; ++i)
      mix[static_cast<std::size_t>(i)] =
          0.5 * (dp.alts[0][static_cast<std::size_t>(i)] +
                 dp.alts[1][static_cast<std::size_t>(i)]);
    for (double alpha : {0.2, 0.4}) {
      const auto inv = best_invariant_region(dp, alpha);
      const auto np = np_region_discrete(dp.p0, mix, alpha);
      REQUIRE(inv.best.cells == np.cells);
    }
  }
}

TEST_CASE("concave max-LR region minimizes power over invariant regions", "[discrete]") {
  // the |x-1/2|-large region is the outermost pair block; among all invariant
  // regions of null mass exactly 0.2 it has the smallest concave-shape power
  const auto dp = discretize(make_symmetric_pair(shape_concave_sqrt(), 1), 10);
  const std::vector<int> max_lr_region = {0, 9};
  double max_lr_power = 0.0;
  for (int c : max_lr_region) max_lr_power += dp.alts[0][static_cast<std::size_t>(c)];

  for (std::uint64_t mask = 1; mask < (1ull << dp.orbits.size()); ++mask) {
    double mass = 0.0, power = 0.0;
    for (std::size_t k = 0; k < dp.orbits.size(); ++k)
      if ((mask >> k) & 1ull)
        for (int cell : dp.orbits[k]) {
          mass += dp.p0[static_cast<std::size_t>(cell)];
          power += dp.alts[0][static_cast<std::size_t>(cell)];
        }
    if (std::abs(mass - 0.2) > 1e-12) continue;
    REQUIRE(power >= max_lr_power - 1e-12);
  }
}

TEST_CASE("single alternative reduces to Neyman-Pearson", "[discrete]") {
  const auto dp = discretize_single(shape_convex_3x2(), 10);
  REQUIRE(dp.orbits.size() == 10);
  const auto inv = best_invariant_region(dp, 0.3);
  const auto np = np_region_discrete(dp.p0, dp.alts[0], 0.3);
  REQUIRE(inv.best.cells == np.cells);
  REQUIRE_THAT(inv.best.power, WithinAbs(np.power, 1e-12));
}

TEST_CASE("bivariate discretization and the enumeration limit", "[discrete]") {
  const auto quad = quad_alternatives_9x2y2();
  const auto dp = discretize(quad, 4);
  REQUIRE(dp.m == 16);
  REQUIRE(dp.orbits.size() == 4);
  double mass = 0.0;
  for (double c : dp.alts[2]) mass += c;
  REQUIRE_THAT(mass, WithinAbs(1.0, 1e-12));

  const auto inv = best_invariant_region(dp, 0.25);
  REQUIRE(inv.per_alt_power.size() == 4);
  for (double p : inv.per_alt_power)
    REQUIRE_THAT(p, WithinAbs(inv.per_alt_power[0], 1e-12));

  // 16x16 grid -> 64 orbits: enumeration refused, greedy fallback flagged
  const auto dp16 = discretize(quad, 16);
  REQUIRE(dp16.orbits.size() == 64);
  REQUIRE_THROWS_AS(best_invariant_region(dp16, 0.25), std::invalid_argument);
  const auto greedy = best_invariant_region(dp16, 0.25, true);
  REQUIRE(greedy.used_greedy);
}

TEST_CASE("validation of discrete problem inputs", "[discrete]") {
  const std::vector<double> p0 = {0.5, 0.5};
  const std::vector<double> bad_sum = {0.6, 0.6};
  const std::vector<double> neg = {1.2, -0.2};
  REQUIRE_THROWS_AS(np_region_discrete(p0, bad_sum, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(np_region_discrete(p0, neg, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(np_region_discrete(p0, std::vector<double>{1.0}, 0.5),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(np_region_discrete(p0, p0, 1.5), std::invalid_argument);
}
