#pragma once

#include <stdexcept>
#include <vector>

#include "lrt/density.hpp"
#include "lrt/quadrature.hpp"

// Closed-form n=1 rejection regions and exact powers for increasing shapes
// on (0,1) under the uniform null. The max-LR test always rejects for
// |x - 1/2| large; the average-LR test matches it for convex shapes and
// flips to |x - 1/2| small for concave shapes. Region measures under the
// uniform null pin the cut points: mass alpha in the tails gives
// (0, alpha/2) u (1 - alpha/2, 1), mass alpha in the middle gives
// (1/2 - alpha/2, 1/2 + alpha/2).

namespace lrt {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Region1D {
  std::vector<Interval> intervals;

  double measure() const {
    double m = 0.0;
    for (const auto& iv : intervals) m += iv.hi - iv.lo;
    return m;
  }
  bool contains(double x) const {
    for (const auto& iv : intervals)
      if (x > iv.lo && x < iv.hi) return true;
    return false;
  }
};

struct AnalyticRegionsN1 {
  Region1D max_lr;
  Region1D avg_lr;
};

inline AnalyticRegionsN1 analytic_region_n1(const Shape1D& shape, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("analytic_region_n1: alpha must be in (0,1)");
  if (!shape.monotone_increasing)
    throw std::invalid_argument("analytic_region_n1: shape must be increasing");
  if (shape.curvature == Curvature::neither)
    throw std::invalid_argument(
        "analytic_region_n1: curvature must be convex or concave");

  const Region1D outer{{{0.0, alpha / 2.0}, {1.0 - alpha / 2.0, 1.0}}};
  const Region1D inner{{{0.5 - alpha / 2.0, 0.5 + alpha / 2.0}}};

  AnalyticRegionsN1 out;
  out.max_lr = outer;
  out.avg_lr = shape.curvature == Curvature::convex ? outer : inner;
  return out;
}

// integral of the shape density over the region, by closed-form CDF when
// available, else by 1e-12 quadrature.
inline double exact_power_n1(const Shape1D& shape, const Region1D& region) {
  double p = 0.0;
  for (const auto& iv : region.intervals) {
    if (!(iv.lo <= iv.hi) || iv.lo < 0.0 || iv.hi > 1.0)
      throw std::invalid_argument("exact_power_n1: region must lie in (0,1)");
    if (shape.cdf) {
      p += shape.cdf(iv.hi) - shape.cdf(iv.lo);
    } else {
      const QuadResult q =
          integrate_adaptive([&](double x) { return shape.density(x); }, iv.lo,
                             iv.hi, QuadratureSpec{1e-12, 1e-12, 8000});
      if (!q.converged)
        throw std::runtime_error("exact_power_n1: quadrature did not converge");
      p += q.value;
    }
  }
  return p;
}

}  // namespace lrt
