#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lrt/density.hpp"

// Bundled density families addressable by the string identifiers used in
// CLI configs: "convex-3x2", "concave-sqrt", "quad-9x2y2" on the unit
// interval/square, and "normal", "cauchy", "logistic", "exponential",
// "half-normal" as location/scale bases.

namespace lrt {

// f(x) = 3x^2 on (0,1): increasing, convex, CDF x^3.
inline Shape1D shape_convex_3x2() {
  Shape1D s;
  s.id = "convex-3x2";
  s.log_f = [](double x) {
    if (!(x > 0.0 && x < 1.0)) return kNegInf;
    return std::log(3.0) + 2.0 * std::log(x);
  };
  s.cdf = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x;
  };
  s.inv_cdf = [](double u) { return std::cbrt(u); };
  s.monotone_increasing = true;
  s.curvature = Curvature::convex;
  return s;
}

// f(x) = 1.5*sqrt(x) on (0,1): increasing, concave, CDF x^(3/2).
inline Shape1D shape_concave_sqrt() {
  Shape1D s;
  s.id = "concave-sqrt";
  s.log_f = [](double x) {
    if (!(x > 0.0 && x < 1.0)) return kNegInf;
    return std::log(1.5) + 0.5 * std::log(x);
  };
  s.cdf = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * std::sqrt(x);
  };
  s.inv_cdf = [](double u) { return std::cbrt(u * u); };
  s.monotone_increasing = true;
  s.curvature = Curvature::concave;
  return s;
}

inline Shape1D shape_uniform() {
  Shape1D s;
  s.id = "uniform";
  s.log_f = [](double x) { return (x > 0.0 && x < 1.0) ? 0.0 : kNegInf; };
  s.cdf = [](double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); };
  s.inv_cdf = [](double u) { return u; };
  s.monotone_increasing = false;
  s.curvature = Curvature::neither;
  return s;
}

inline Shape1D shape_by_id(std::string_view id) {
  if (id == "convex-3x2") return shape_convex_3x2();
  if (id == "concave-sqrt") return shape_concave_sqrt();
  if (id == "uniform") return shape_uniform();
  throw std::invalid_argument(
      "unknown shape id '" + std::string(id) +
      "' (valid: convex-3x2, concave-sqrt, uniform)");
}

// f2(x,y) = 9 x^2 y^2, strictly increasing in both variables.
inline QuadAlternatives quad_alternatives_9x2y2() {
  return make_quad_alternatives(shape_convex_3x2(), shape_convex_3x2());
}

inline Base1D base_normal() {
  Base1D b;
  b.id = "normal";
  b.log_f = [](double y) {
    return -0.5 * y * y - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  b.draw = [](rng::Sequence& seq) { return seq.normal(); };
  b.cdf = [](double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); };
  b.positive_support = false;
  b.log_concave = true;
  return b;
}

inline Base1D base_cauchy() {
  Base1D b;
  b.id = "cauchy";
  b.log_f = [](double y) {
    return -std::log(std::numbers::pi) - std::log1p(y * y);
  };
  b.draw = [](rng::Sequence& seq) { return seq.cauchy(); };
  b.cdf = [](double y) {
    return 0.5 + std::atan(y) / std::numbers::pi;
  };
  b.positive_support = false;
  b.log_concave = false;  // multimodal likelihoods; MLE uses multi-start
  return b;
}

inline Base1D base_logistic() {
  Base1D b;
  b.id = "logistic";
  b.log_f = [](double y) {
    // -y - 2 log(1 + e^-y), stable on both tails
    const double a = -std::abs(y);
    return a - 2.0 * std::log1p(std::exp(a));
  };
  b.draw = [](rng::Sequence& seq) { return seq.logistic(); };
  b.cdf = [](double y) { return 1.0 / (1.0 + std::exp(-y)); };
  b.positive_support = false;
  b.log_concave = true;
  return b;
}

inline Base1D base_exponential() {
  Base1D b;
  b.id = "exponential";
  b.log_f = [](double y) { return y > 0.0 ? -y : kNegInf; };
  b.draw = [](rng::Sequence& seq) { return seq.exponential(); };
  b.cdf = [](double y) { return y <= 0.0 ? 0.0 : -std::expm1(-y); };
  b.positive_support = true;
  b.log_concave = true;
  return b;
}

inline Base1D base_half_normal() {
  Base1D b;
  b.id = "half-normal";
  b.log_f = [](double y) {
    if (!(y > 0.0)) return kNegInf;
    return 0.5 * std::log(2.0 / std::numbers::pi) - 0.5 * y * y;
  };
  b.draw = [](rng::Sequence& seq) { return seq.half_normal(); };
  b.cdf = [](double y) {
    return y <= 0.0 ? 0.0 : std::erf(y / std::numbers::sqrt2);
  };
  b.positive_support = true;
  b.log_concave = true;
  return b;
}

inline Base1D base_by_id(std::string_view id) {
  if (id == "normal") return base_normal();
  if (id == "cauchy") return base_cauchy();
  if (id == "logistic") return base_logistic();
  if (id == "exponential") return base_exponential();
  if (id == "half-normal") return base_half_normal();
  throw std::invalid_argument(
      "unknown base id '" + std::string(id) +
      "' (valid: normal, cauchy, logistic, exponential, half-normal)");
}

}  // namespace lrt
