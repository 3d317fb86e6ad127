#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "lrt/families.hpp"
#include "lrt/statistics.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace lrt;

namespace {

TestStatistic pair_stat(StatKind kind, const Shape1D& shape, int n) {
  auto pair = make_symmetric_pair(shape, n);
  std::vector<Density> alts = {pair.p1, pair.p2};
  return kind == StatKind::max_lr
             ? make_max_lr(uniform_cube_density(n), alts)
             : make_avg_lr(uniform_cube_density(n), alts);
}

// closed form for the location denominator: prod_i phi(x_i - t) integrated
// over t equals (2pi)^(-(n-1)/2) n^(-1/2) exp(-S/2), S = sum (x_i - xbar)^2
double gaussian_integrated_log(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double xi : x) mean += xi;
  mean /= n;
  double s = 0.0;
  for (double xi : x) s += (xi - mean) * (xi - mean);
  return -0.5 * (n - 1.0) * std::log(2.0 * std::numbers::pi) -
         0.5 * std::log(n) - 0.5 * s;
}

// closed form for the exponential scale integral: Gamma(n) / T^n, T = sum x_i
double exp_scale_integrated_log(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double t = 0.0;
  for (double xi : x) t += xi;
  return std::lgamma(n) - n * std::log(t);
}

// half-normal scale integral: (2/pi)^(n/2) * 2^(n/2 - 1) Gamma(n/2) Q^(-n/2),
// Q = sum x_i^2
double halfnormal_scale_integrated_log(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double q = 0.0;
  for (double xi : x) q += xi * xi;
  return 0.5 * n * std::log(2.0 / std::numbers::pi) +
         (0.5 * n - 1.0) * std::log(2.0) + std::lgamma(0.5 * n) -
         0.5 * n * std::log(q);
}

}  // namespace

TEST_CASE("max_lr on the convex pair", "[stats]") {
  const auto t = pair_stat(StatKind::max_lr, shape_convex_3x2(), 1);
  const double x[1] = {0.9};
  REQUIRE_THAT(max_lr(x, t).value, WithinAbs(std::log(2.43), 1e-12));
  const double mid[1] = {0.5};
  REQUIRE_THAT(max_lr(mid, t).value, WithinAbs(std::log(0.75), 1e-12));
}

TEST_CASE("max_lr on the concave pair is increasing in |x - 1/2|", "[stats]") {
  const auto t = pair_stat(StatKind::max_lr, shape_concave_sqrt(), 1);
  double prev = -1e300;
  for (int k = 0; k < 200; ++k) {
    const double d = 0.0005 + 0.4985 * k / 199.0;
    const double x[1] = {0.5 + d};
    const double v = t.evaluate(x).value;
    REQUIRE(v > prev);
    prev = v;
    const double xm[1] = {0.5 - d};
    REQUIRE_THAT(t.evaluate(xm).value, WithinAbs(v, 1e-12));
  }
}

TEST_CASE("avg_lr frozen values", "[stats]") {
  const auto tc = pair_stat(StatKind::avg_lr, shape_convex_3x2(), 1);
  const double mid[1] = {0.5};
  REQUIRE_THAT(avg_lr(mid, tc).value, WithinAbs(std::log(0.75), 1e-12));

  const auto ts = pair_stat(StatKind::avg_lr, shape_concave_sqrt(), 1);
  REQUIRE_THAT(avg_lr(mid, ts).value,
               WithinAbs(std::log(1.5 * std::sqrt(0.5)), 1e-12));
}

TEST_CASE("avg_lr is reflection symmetric", "[stats]") {
  const auto t = pair_stat(StatKind::avg_lr, shape_concave_sqrt(), 3);
  rng::Stream s(31, "sym");
  std::vector<double> x(3);
  for (int i = 0; i < 500; ++i) {
    rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
    for (auto& v : x) v = seq.uniform();
    const auto rx = reflect(x);
    REQUIRE(std::abs(t.evaluate(x).value - t.evaluate(rx).value) <= 1e-12);
  }
}

TEST_CASE("pointwise ordering avg <= max <= avg + log s", "[stats]") {
  for (const Shape1D& shape : {shape_convex_3x2(), shape_concave_sqrt()}) {
    const auto tmax = pair_stat(StatKind::max_lr, shape, 3);
    const auto tavg = pair_stat(StatKind::avg_lr, shape, 3);
    rng::Stream s(32, "order");
    std::vector<double> x(3);
    for (int i = 0; i < 1000; ++i) {
      rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
      for (auto& v : x) v = seq.uniform();
      const double a = tavg.evaluate(x).value;
      const double m = tmax.evaluate(x).value;
      REQUIRE(a <= m + 1e-12);
      REQUIRE(m <= a + std::log(2.0) + 1e-12);
    }
  }
}

TEST_CASE("degenerate and off-support points", "[stats]") {
  const auto t = pair_stat(StatKind::max_lr, shape_convex_3x2(), 1);
  const double outside[1] = {1.5};
  const auto r = t.evaluate(outside);
  REQUIRE(r.degenerate);
  REQUIRE(r.value == kNegInf);
}

TEST_CASE("weight validation", "[stats]") {
  auto pair = make_symmetric_pair(shape_convex_3x2(), 1);
  std::vector<Density> alts = {pair.p1, pair.p2};
  const Density null = uniform_cube_density(1);
  REQUIRE_THROWS_AS(make_avg_lr(null, alts, {0.5, 0.6}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_avg_lr(null, alts, {1.2, -0.2}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_avg_lr(null, alts, {1.0}), std::invalid_argument);
  REQUIRE_NOTHROW(make_avg_lr(null, alts, {0.3, 0.7}));
  REQUIRE_THROWS_AS(make_max_lr(null, {}), std::invalid_argument);
}

TEST_CASE("weighted avg_lr interpolates the mixture", "[stats]") {
  auto pair = make_symmetric_pair(shape_convex_3x2(), 1);
  std::vector<Density> alts = {pair.p1, pair.p2};
  const auto t = make_avg_lr(uniform_cube_density(1), alts, {0.3, 0.7});
  const double x[1] = {0.9};
  const double expect = std::log(0.3 * 2.43 + 0.7 * 0.03);
  REQUIRE_THAT(t.evaluate(x).value, WithinAbs(expect, 1e-12));
}

TEST_CASE("integrated location LR: identical families give zero", "[stats]") {
  const double x[3] = {-0.4, 0.2, 1.7};
  const auto r = integrated_lr_location(x, base_normal(), base_normal());
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, WithinAbs(0.0, 1e-12));
}

TEST_CASE("integrated location LR: gaussian denominator matches closed form", "[stats]") {
  rng::Stream s(404, "quadcheck");
  std::vector<double> x(3);
  for (int i = 0; i < 100; ++i) {
    rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
    for (auto& v : x) v = seq.normal();
    const auto r = integrated_lr_location(x, base_normal(), base_cauchy());
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.log_den - gaussian_integrated_log(x)) <= 1e-8);
  }
  // the n=2 spot value
  const double x2[2] = {0.0, 1.0};
  const auto r2 = integrated_lr_location(x2, base_normal(), base_cauchy());
  REQUIRE_THAT(std::exp(r2.log_den), WithinRel(0.21969564336456785, 1e-8));
}

TEST_CASE("integrated location LR is translation invariant", "[stats]") {
  const double x[3] = {-1.2, 0.3, 2.8};
  const auto base_val = integrated_lr_location(x, base_normal(), base_cauchy());
  for (double c : {0.5, -3.0, 10.0}) {
    double shifted[3];
    for (int i = 0; i < 3; ++i) shifted[i] = x[i] + c;
    const auto r = integrated_lr_location(shifted, base_normal(), base_cauchy());
    REQUIRE(std::abs(r.value - base_val.value) <= 1e-8);
  }
}

TEST_CASE("integrated scale LR: closed forms and invariance", "[stats]") {
  const double x[2] = {1.0, 1.0};
  const auto r = integrated_lr_scale(x, base_exponential(), base_half_normal());
  REQUIRE(r.converged);
  REQUIRE_THAT(std::exp(r.log_den), WithinRel(0.25, 1e-8));
  REQUIRE_THAT(std::exp(r.log_num), WithinRel(1.0 / std::numbers::pi, 1e-8));

  rng::Stream s(405, "scalecheck");
  std::vector<double> y(3);
  for (int i = 0; i < 100; ++i) {
    rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
    for (auto& v : y) v = seq.exponential();
    const auto r1 = integrated_lr_scale(y, base_exponential(), base_half_normal());
    REQUIRE(r1.converged);
    REQUIRE(std::abs(r1.log_den - exp_scale_integrated_log(y)) <= 1e-8);
    REQUIRE(std::abs(r1.log_num - halfnormal_scale_integrated_log(y)) <= 1e-8);
  }

  const double z[3] = {0.3, 1.1, 2.6};
  const auto zb = integrated_lr_scale(z, base_exponential(), base_half_normal());
  for (double c : {0.1, 3.7, 40.0}) {
    double scaled[3];
    for (int i = 0; i < 3; ++i) scaled[i] = c * z[i];
    const auto rc = integrated_lr_scale(scaled, base_exponential(), base_half_normal());
    REQUIRE(std::abs(rc.value - zb.value) <= 1e-8);
  }

  const double bad[2] = {1.0, -0.5};
  REQUIRE_THROWS_AS(integrated_lr_scale(bad, base_exponential(), base_half_normal()),
                    std::invalid_argument);
}

TEST_CASE("mle_location closed forms", "[stats]") {
  const double x[4] = {0.4, -1.3, 2.2, 0.9};
  const auto m = mle_location(x, base_normal());
  REQUIRE(m.converged);
  REQUIRE_THAT(m.estimate, WithinAbs((0.4 - 1.3 + 2.2 + 0.9) / 4.0, 1e-8));

  const double single[1] = {2.5};
  const auto mc = mle_location(single, base_cauchy());
  REQUIRE(mc.converged);
  REQUIRE_THAT(mc.estimate, WithinAbs(2.5, 1e-8));
}

TEST_CASE("mle_location shift equivariance", "[stats]") {
  const double x[3] = {-0.7, 0.1, 1.9};
  for (const Base1D& base : {base_normal(), base_cauchy(), base_logistic()}) {
    const auto m0 = mle_location(x, base);
    double shifted[3];
    for (int i = 0; i < 3; ++i) shifted[i] = x[i] + 5.25;
    const auto m1 = mle_location(shifted, base);
    REQUIRE(std::abs(m1.estimate - m0.estimate - 5.25) <= 1e-8);
  }
}

TEST_CASE("mle_location cauchy multimodal case beats a fine grid", "[stats]") {
  const double x[2] = {-3.0, 3.0};
  const auto m = mle_location(x, base_cauchy());
  REQUIRE(m.converged);
  auto loglik = [&](double t) {
    return base_cauchy().log_f(x[0] - t) + base_cauchy().log_f(x[1] - t);
  };
  double grid_best = -1e300;
  for (int k = 0; k < 10000; ++k) {
    const double t = -6.0 + 12.0 * k / 9999.0;
    grid_best = std::max(grid_best, loglik(t));
  }
  REQUIRE(m.objective >= grid_best - 1e-9);
  // the symmetric modes sit near +-sqrt(8); theta = 0 is a local minimum
  REQUIRE_THAT(std::abs(m.estimate), WithinAbs(std::sqrt(8.0), 1e-5));
}

TEST_CASE("mle_scale closed forms and equivariance", "[stats]") {
  const double x[4] = {0.5, 1.5, 2.5, 3.5};
  const auto me = mle_scale(x, base_exponential());
  REQUIRE(me.converged);
  REQUIRE_THAT(me.estimate, WithinAbs(2.0, 1e-8));

  const auto mh = mle_scale(x, base_half_normal());
  double q = 0.0;
  for (double xi : x) q += xi * xi;
  REQUIRE_THAT(mh.estimate, WithinAbs(std::sqrt(q / 4.0), 1e-8));

  double scaled[4];
  for (int i = 0; i < 4; ++i) scaled[i] = 7.0 * x[i];
  const auto ms = mle_scale(scaled, base_exponential());
  REQUIRE_THAT(ms.estimate, WithinRel(7.0 * me.estimate, 1e-8));

  const double bad[2] = {1.0, 0.0};
  REQUIRE_THROWS_AS(mle_scale(bad, base_exponential()), std::invalid_argument);
}

TEST_CASE("profiled location LR", "[stats]") {
  const double x[3] = {-0.2, 0.9, 1.4};
  REQUIRE_THAT(max_lr_location(x, base_normal(), base_normal()), WithinAbs(0.0, 1e-10));

  // translation invariance
  const double v0 = max_lr_location(x, base_normal(), base_cauchy());
  double shifted[3];
  for (int i = 0; i < 3; ++i) shifted[i] = x[i] + 11.0;
  REQUIRE(std::abs(max_lr_location(shifted, base_normal(), base_cauchy()) - v0) <= 1e-8);

  // grid-search oracle on the n=2 spread case
  const double y[2] = {-3.0, 3.0};
  const double v = max_lr_location(y, base_normal(), base_cauchy());
  auto cauchy_ll = [&](double t) {
    return base_cauchy().log_f(y[0] - t) + base_cauchy().log_f(y[1] - t);
  };
  double grid_num = -1e300;
  for (int k = 0; k < 10000; ++k) {
    const double t = -6.0 + 12.0 * k / 9999.0;
    grid_num = std::max(grid_num, cauchy_ll(t));
  }
  const double den = base_normal().log_f(-3.0) + base_normal().log_f(3.0);
  REQUIRE(v >= grid_num - den - 1e-9);
  REQUIRE_THAT(v, WithinAbs(grid_num - den, 1e-5));
}

TEST_CASE("profiled scale LR", "[stats]") {
  const double x[3] = {0.4, 1.2, 2.9};
  REQUIRE_THAT(max_lr_scale(x, base_exponential(), base_exponential()),
               WithinAbs(0.0, 1e-10));

  const double y[2] = {1.0, 1.0};
  // tau0 = mean = 1, tau1 = rms = 1: value = log(2/pi) - 1 + 2
  const double v = max_lr_scale(y, base_exponential(), base_half_normal());
  REQUIRE_THAT(v, WithinAbs(std::log(2.0 / std::numbers::pi) + 1.0, 1e-6));

  const double v3 = max_lr_scale(x, base_exponential(), base_half_normal());
  double scaled[3];
  for (int i = 0; i < 3; ++i) scaled[i] = 0.125 * x[i];
  REQUIRE(std::abs(max_lr_scale(scaled, base_exponential(), base_half_normal()) - v3) <= 1e-8);
}

TEST_CASE("profile value dominates a 1e4-point grid", "[stats]") {
  rng::Stream s(505, "profile");
  std::vector<double> x(3);
  for (int rep = 0; rep < 20; ++rep) {
    rng::Sequence seq = s.at(static_cast<std::uint64_t>(rep));
    for (auto& v : x) v = seq.cauchy();
    const auto m = mle_location(x, base_cauchy());
    auto loglik = [&](double t) {
      double v = 0.0;
      for (double xi : x) v += base_cauchy().log_f(xi - t);
      return v;
    };
    const auto sorted = [&] {
      auto c = x;
      std::sort(c.begin(), c.end());
      return c;
    }();
    double grid_best = -1e300;
    const double lo = sorted.front() - 1.0, hi = sorted.back() + 1.0;
    for (int k = 0; k < 10000; ++k)
      grid_best = std::max(grid_best, loglik(lo + (hi - lo) * k / 9999.0));
    REQUIRE(m.objective >= grid_best - 1e-9);
  }
}
