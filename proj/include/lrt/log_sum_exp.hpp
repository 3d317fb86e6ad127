#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace lrt {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; -inf operands drop out.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  if (m == kPosInf) return kPosInf;
  return m + std::log1p(std::exp(-(a > b ? a - b : b - a)));
}

// log sum_i exp(v[i]); empty input and all -inf both give -inf.
inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = x > m ? x : m;
  if (m == kNegInf || m == kPosInf) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// log sum_i w[i] exp(v[i]); terms with w[i] == 0 are skipped so that a zero
// weight never turns a -inf log-density into a NaN.
inline double log_sum_exp_weighted(std::span<const double> v,
                                   std::span<const double> w) {
  double m = kNegInf;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (w[i] > 0.0 && v[i] > m) m = v[i];
  if (m == kNegInf || m == kPosInf) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (w[i] > 0.0) s += w[i] * std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace lrt
