#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "lrt/log_sum_exp.hpp"

using Catch::Matchers::WithinAbs;
using lrt::kNegInf;
using lrt::log_add;
using lrt::log_sum_exp;
using lrt::log_sum_exp_weighted;

TEST_CASE("log_add basics", "[lse]") {
  REQUIRE_THAT(log_add(std::log(2.0), std::log(3.0)),
               WithinAbs(std::log(5.0), 1e-14));
  REQUIRE(log_add(kNegInf, 1.5) == 1.5);
  REQUIRE(log_add(1.5, kNegInf) == 1.5);
  REQUIRE(log_add(kNegInf, kNegInf) == kNegInf);
}

TEST_CASE("log_sum_exp is stable for large magnitudes", "[lse]") {
  const std::array<double, 2> big = {1000.0, 1000.0};
  REQUIRE_THAT(log_sum_exp(big), WithinAbs(1000.0 + std::log(2.0), 1e-12));
  const std::array<double, 2> small = {-1000.0, -1000.0};
  REQUIRE_THAT(log_sum_exp(small), WithinAbs(-1000.0 + std::log(2.0), 1e-12));
}

TEST_CASE("log_sum_exp edge cases", "[lse]") {
  const std::array<double, 3> with_ninf = {kNegInf, 0.0, kNegInf};
  REQUIRE_THAT(log_sum_exp(with_ninf), WithinAbs(0.0, 1e-15));
  const std::array<double, 2> all_ninf = {kNegInf, kNegInf};
  REQUIRE(log_sum_exp(all_ninf) == kNegInf);
  REQUIRE(log_sum_exp({}) == kNegInf);
}

TEST_CASE("weighted log_sum_exp", "[lse]") {
  // log(0.25 e^0 + 0.75 e^0) = 0
  const std::array<double, 2> v = {0.0, 0.0};
  const std::array<double, 2> w = {0.25, 0.75};
  REQUIRE_THAT(log_sum_exp_weighted(v, w), WithinAbs(0.0, 1e-14));

  // a zero weight must drop a -inf term instead of producing NaN
  const std::array<double, 2> v2 = {kNegInf, std::log(2.0)};
  const std::array<double, 2> w2 = {0.0, 1.0};
  REQUIRE_THAT(log_sum_exp_weighted(v2, w2), WithinAbs(std::log(2.0), 1e-14));

  // uniform weights match plain lse minus log s
  const std::array<double, 4> v3 = {0.1, -0.7, 2.3, 1.1};
  const std::array<double, 4> w3 = {0.25, 0.25, 0.25, 0.25};
  REQUIRE_THAT(log_sum_exp_weighted(v3, w3),
               WithinAbs(log_sum_exp(v3) - std::log(4.0), 1e-13));
}
