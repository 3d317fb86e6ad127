#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrt/density.hpp"
#include "lrt/golden_search.hpp"
#include "lrt/log_sum_exp.hpp"
#include "lrt/quadrature.hpp"

// The four test statistics, all on the log scale:
//
//   max-lr        max_i log p_i(x) - log p0(x)
//   avg-lr        log sum_i w_i p_i(x) - log p0(x)
//   int-loc-lr    log I g(x-theta) dtheta - log I f(x-theta) dtheta
//   int-scale-lr  log I nu^(n-1) g(nu x) dnu - log I nu^(n-1) f(nu x) dnu
//
// plus the MLE-profiled max-lr variants for location and scale families.
// Thresholding a statistic is invariant under monotone transforms, so the
// log scale changes no decision.

namespace lrt {

enum class StatKind {
  max_lr,
  avg_lr,
  int_loc_lr,
  int_scale_lr,
  max_loc_lr,
  max_scale_lr
};

// CLI identifier; the MLE-profiled variants report as plain "max-lr".
inline std::string stat_id(StatKind k) {
  switch (k) {
    case StatKind::max_lr:
    case StatKind::max_loc_lr:
    case StatKind::max_scale_lr:
      return "max-lr";
    case StatKind::avg_lr:
      return "avg-lr";
    case StatKind::int_loc_lr:
      return "int-loc-lr";
    case StatKind::int_scale_lr:
      return "int-scale-lr";
  }
  return "?";
}

struct StatResult {
  double value = kNegInf;
  bool degenerate = false;  // every density vanished at x
  bool failed = false;      // quadrature or optimizer did not converge
};

struct IntegratedLR {
  double value = kNegInf;
  double log_num = kNegInf;
  double log_den = kNegInf;
  double num_rel_err = 0.0;
  double den_rel_err = 0.0;
  bool degenerate = false;
  bool converged = true;
};

struct MleResult {
  double estimate = 0.0;
  double objective = kNegInf;
  double gradient = 0.0;
  bool converged = false;
};

namespace detail {

inline std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Interpolated empirical quantile of a sorted vector.
inline double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * (static_cast<double>(s.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * s[lo] + w * s[hi];
}

inline double median_sorted(const std::vector<double>& s) {
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

// Value comparisons flatten out at ~sqrt(eps) around a smooth maximum, which
// caps golden-section accuracy near 1e-8. Bisecting the sign of the central
// difference gradient pushes the located maximum to ~1e-9.
template <typename F>
double polish_maximum(F&& f, double x0, double width) {
  const double h = 1e-6;
  auto grad_sign = [&](double t) { return f(t + h) - f(t - h); };
  double lo = x0 - width, hi = x0 + width;
  const double glo = grad_sign(lo), ghi = grad_sign(hi);
  if (!(glo > 0.0 && ghi < 0.0)) return x0;  // no clean bracket; keep x0
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (grad_sign(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MLEs

// theta maximizing sum_i log base(x_i - theta). Log-concave bases get one
// golden search over the padded data hull; otherwise 16 data-quantile seeds
// with local windows (Cauchy likelihoods can be multimodal). The gradient
// check is a central difference at h = 1e-6.
inline MleResult mle_location(std::span<const double> x, const Base1D& base) {
  if (x.empty()) throw std::invalid_argument("mle_location: empty sample");
  const auto s = detail::sorted_copy(x);
  auto loglik = [&](double theta) {
    double v = 0.0;
    for (double xi : x) v += base.log_f(xi - theta);
    return v;
  };

  const double range = s.back() - s.front();
  const double pad = 0.5 * (1.0 + range);
  ScalarMax m;
  if (base.log_concave) {
    m = maximize_golden(loglik, s.front() - pad, s.back() + pad);
  } else {
    std::vector<double> seeds;
    seeds.reserve(16);
    for (int k = 0; k < 16; ++k)
      seeds.push_back(detail::quantile_sorted(s, (k + 0.5) / 16.0));
    m = maximize_multistart(loglik, std::move(seeds), pad);
  }

  MleResult out;
  out.estimate =
      detail::polish_maximum(loglik, m.x, 1e-5 * (1.0 + std::abs(m.x)));
  out.objective = loglik(out.estimate);
  // revert only if clearly worse; near the maximum the two values differ by
  // less than evaluation noise
  if (out.objective < m.fx - 1e-9 * (1.0 + std::abs(m.fx))) {
    out.estimate = m.x;
    out.objective = m.fx;
  }
  const double h = 1e-6;
  out.gradient =
      (loglik(out.estimate + h) - loglik(out.estimate - h)) / (2.0 * h);
  out.converged = m.converged &&
                  std::abs(out.gradient) < 1e-6 * (1.0 + std::abs(out.estimate));
  return out;
}

// tau > 0 maximizing -n log tau + sum_i log base(x_i / tau); the search runs
// over u = log tau (seeds span several e-folds around the data scale).
inline MleResult mle_scale(std::span<const double> x, const Base1D& base) {
  if (x.empty()) throw std::invalid_argument("mle_scale: empty sample");
  for (double xi : x)
    if (!(xi > 0.0)) throw std::invalid_argument("mle_scale: sample must be positive");

  const double n = static_cast<double>(x.size());
  auto loglik_tau = [&](double tau) {
    double v = -n * std::log(tau);
    for (double xi : x) v += base.log_f(xi / tau);
    return v;
  };
  auto loglik_u = [&](double u) { return loglik_tau(std::exp(u)); };

  const auto s = detail::sorted_copy(x);
  ScalarMax m;
  if (base.log_concave) {
    m = maximize_golden(loglik_u, std::log(s.front()) - 2.0,
                        std::log(s.back()) + 2.0);
  } else {
    std::vector<double> seeds;
    for (int k = 0; k < 16; ++k)
      seeds.push_back(std::log(detail::quantile_sorted(s, (k + 0.5) / 16.0)));
    m = maximize_multistart(loglik_u, std::move(seeds), 2.0);
  }

  MleResult out;
  const double tau0 = std::exp(m.x);
  out.estimate = detail::polish_maximum(
      loglik_tau, tau0, std::min(0.5 * tau0, 1e-5 * (1.0 + tau0)));
  out.objective = loglik_tau(out.estimate);
  if (out.objective < m.fx - 1e-9 * (1.0 + std::abs(m.fx))) {
    out.estimate = tau0;
    out.objective = m.fx;
  }
  const double h = 1e-6;
  out.gradient =
      (loglik_tau(out.estimate + h) - loglik_tau(out.estimate - h)) / (2.0 * h);
  out.converged =
      m.converged && std::abs(out.gradient) < 1e-6 * (1.0 + out.estimate);
  return out;
}

// ---------------------------------------------------------------------------
// Integrated likelihood ratios

namespace detail {

// Breakpoints for the theta-integral: the data points and the data mean
// plus/minus a few likelihood widths (~1/sqrt(n)).
inline std::vector<double> location_breaks(std::span<const double> x) {
  std::vector<double> br(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double w = 1.0 / std::sqrt(n);
  for (double k : {0.0, 1.0, 3.0}) {
    br.push_back(mean - k * w);
    br.push_back(mean + k * w);
  }
  return br;
}

}  // namespace detail

inline IntegratedLR integrated_lr_location(std::span<const double> x,
                                           const Base1D& f_base,
                                           const Base1D& g_base,
                                           const QuadratureSpec& quad = {}) {
  if (x.empty()) throw std::invalid_argument("integrated_lr_location: empty sample");
  if (f_base.positive_support || g_base.positive_support)
    throw std::invalid_argument(
        "integrated_lr_location: bases must live on the real line");

  const auto s = detail::sorted_copy(x);
  const double center = detail::median_sorted(s);
  const double spread = s.back() - s.front();
  const double scale = std::max(1.0, 0.5 * spread);
  const auto breaks = detail::location_breaks(x);

  auto log_prod = [&x](const Base1D& b, double theta) {
    double v = 0.0;
    for (double xi : x) v += b.log_f(xi - theta);
    return v;
  };

  const LogQuadResult den = log_integrate_real_line(
      [&](double t) { return log_prod(f_base, t); }, quad, center, scale, breaks);
  const LogQuadResult num = log_integrate_real_line(
      [&](double t) { return log_prod(g_base, t); }, quad, center, scale, breaks);

  IntegratedLR out;
  out.log_num = num.log_value;
  out.log_den = den.log_value;
  out.num_rel_err = num.rel_error;
  out.den_rel_err = den.rel_error;
  out.converged = num.converged && den.converged;
  if (num.log_value == kNegInf && den.log_value == kNegInf) {
    out.degenerate = true;
    out.value = kNegInf;
  } else if (den.log_value == kNegInf) {
    out.value = kPosInf;
  } else {
    out.value = num.log_value - den.log_value;
  }
  return out;
}

inline IntegratedLR integrated_lr_scale(std::span<const double> x,
                                        const Base1D& f_base,
                                        const Base1D& g_base,
                                        const QuadratureSpec& quad = {}) {
  if (x.empty()) throw std::invalid_argument("integrated_lr_scale: empty sample");
  for (double xi : x)
    if (!(xi > 0.0))
      throw std::invalid_argument("integrated_lr_scale: sample must be positive");

  const int n = static_cast<int>(x.size());

  // nu-breaks: reciprocals of the data (where nu*x_i = 1) and of the mean.
  std::vector<double> breaks;
  breaks.reserve(x.size() + 5);
  double mean = 0.0;
  for (double xi : x) {
    breaks.push_back(1.0 / xi);
    mean += xi;
  }
  mean /= static_cast<double>(n);
  for (double c : {0.25, 1.0, 4.0}) breaks.push_back(c / mean);

  auto log_prod = [&x](const Base1D& b, double nu) {
    double v = 0.0;
    for (double xi : x) v += b.log_f(nu * xi);
    return v;
  };

  const LogQuadResult den = log_integrate_scale(
      [&](double nu) { return log_prod(f_base, nu); }, n, quad, breaks);
  const LogQuadResult num = log_integrate_scale(
      [&](double nu) { return log_prod(g_base, nu); }, n, quad, breaks);

  IntegratedLR out;
  out.log_num = num.log_value;
  out.log_den = den.log_value;
  out.num_rel_err = num.rel_error;
  out.den_rel_err = den.rel_error;
  out.converged = num.converged && den.converged;
  if (num.log_value == kNegInf && den.log_value == kNegInf) {
    out.degenerate = true;
    out.value = kNegInf;
  } else if (den.log_value == kNegInf) {
    out.value = kPosInf;
  } else {
    out.value = num.log_value - den.log_value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistic descriptor

struct IntegratedPair {
  Base1D f_base;  // hypothesis family
  Base1D g_base;  // alternative family
  int n = 1;
  QuadratureSpec quad{};
};

class TestStatistic {
 public:
  StatKind kind = StatKind::max_lr;
  Density null_density;               // max/avg kinds (simple null)
  std::vector<Density> alternatives;  // max/avg kinds
  std::vector<double> weights;        // avg kind
  std::optional<IntegratedPair> families;  // integrated/profiled kinds

  std::string id() const { return stat_id(kind); }

  StatResult evaluate(std::span<const double> x) const {
    switch (kind) {
      case StatKind::max_lr:
      case StatKind::avg_lr: {
        // stack buffer for the common small-s case; this is the MC hot path
        double buf[8];
        std::vector<double> heap;
        std::span<double> logs;
        if (alternatives.size() <= 8) {
          logs = std::span<double>(buf, alternatives.size());
        } else {
          heap.resize(alternatives.size());
          logs = heap;
        }
        for (std::size_t i = 0; i < alternatives.size(); ++i)
          logs[i] = alternatives[i].log_pdf(x);
        const double l0 = null_density.log_pdf(x);
        double la;
        if (kind == StatKind::max_lr) {
          la = kNegInf;
          for (double v : logs) la = v > la ? v : la;
        } else {
          la = log_sum_exp_weighted(logs, weights);
        }
        StatResult r;
        if (la == kNegInf && l0 == kNegInf) {
          r.value = kNegInf;
          r.degenerate = true;
        } else if (l0 == kNegInf) {
          r.value = kPosInf;
        } else {
          r.value = la - l0;
        }
        return r;
      }
      case StatKind::int_loc_lr: {
        const IntegratedLR ir = integrated_lr_location(
            x, families->f_base, families->g_base, families->quad);
        return StatResult{ir.value, ir.degenerate, !ir.converged};
      }
      case StatKind::int_scale_lr: {
        const IntegratedLR ir = integrated_lr_scale(
            x, families->f_base, families->g_base, families->quad);
        return StatResult{ir.value, ir.degenerate, !ir.converged};
      }
      case StatKind::max_loc_lr: {
        const MleResult m1 = mle_location(x, families->g_base);
        const MleResult m0 = mle_location(x, families->f_base);
        double num = 0.0, den = 0.0;
        for (double xi : x) {
          num += families->g_base.log_f(xi - m1.estimate);
          den += families->f_base.log_f(xi - m0.estimate);
        }
        return StatResult{num - den, false, !(m1.converged && m0.converged)};
      }
      case StatKind::max_scale_lr: {
        const MleResult m1 = mle_scale(x, families->g_base);
        const MleResult m0 = mle_scale(x, families->f_base);
        const double n = static_cast<double>(x.size());
        double num = -n * std::log(m1.estimate);
        double den = -n * std::log(m0.estimate);
        for (double xi : x) {
          num += families->g_base.log_f(xi / m1.estimate);
          den += families->f_base.log_f(xi / m0.estimate);
        }
        return StatResult{num - den, false, !(m1.converged && m0.converged)};
      }
    }
    return {};
  }
};

inline void check_weights(const std::vector<double>& w, std::size_t s) {
  if (w.size() != s)
    throw std::invalid_argument("weights size must match alternative count");
  double sum = 0.0;
  for (double wi : w) {
    if (wi < 0.0) throw std::invalid_argument("weights must be nonnegative");
    sum += wi;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("weights must sum to 1");
}

inline TestStatistic make_max_lr(Density null, std::vector<Density> alts) {
  if (alts.empty()) throw std::invalid_argument("max-lr: alternatives empty");
  TestStatistic t;
  t.kind = StatKind::max_lr;
  t.null_density = std::move(null);
  t.alternatives = std::move(alts);
  return t;
}

// Uniform 1/s weights unless a probability vector is supplied (the
// theta*p1 + (1-theta)*p2 mixture family is the weighted case).
inline TestStatistic make_avg_lr(Density null, std::vector<Density> alts,
                                 std::vector<double> weights = {}) {
  if (alts.empty()) throw std::invalid_argument("avg-lr: alternatives empty");
  if (weights.empty())
    weights.assign(alts.size(), 1.0 / static_cast<double>(alts.size()));
  check_weights(weights, alts.size());
  TestStatistic t;
  t.kind = StatKind::avg_lr;
  t.null_density = std::move(null);
  t.alternatives = std::move(alts);
  t.weights = std::move(weights);
  return t;
}

inline TestStatistic make_integrated_location_lr(Base1D f, Base1D g, int n,
                                                 QuadratureSpec quad = {}) {
  TestStatistic t;
  t.kind = StatKind::int_loc_lr;
  t.families = IntegratedPair{std::move(f), std::move(g), n, quad};
  return t;
}

inline TestStatistic make_integrated_scale_lr(Base1D f, Base1D g, int n,
                                              QuadratureSpec quad = {}) {
  TestStatistic t;
  t.kind = StatKind::int_scale_lr;
  t.families = IntegratedPair{std::move(f), std::move(g), n, quad};
  return t;
}

inline TestStatistic make_max_location_lr(Base1D f, Base1D g, int n) {
  TestStatistic t;
  t.kind = StatKind::max_loc_lr;
  t.families = IntegratedPair{std::move(f), std::move(g), n, QuadratureSpec{}};
  return t;
}

inline TestStatistic make_max_scale_lr(Base1D f, Base1D g, int n) {
  TestStatistic t;
  t.kind = StatKind::max_scale_lr;
  t.families = IntegratedPair{std::move(f), std::move(g), n, QuadratureSpec{}};
  return t;
}

// Free-function forms of the two finite-alternative statistics.
inline StatResult max_lr(std::span<const double> x, const TestStatistic& t) {
  if (t.kind != StatKind::max_lr)
    throw std::invalid_argument("max_lr: statistic kind mismatch");
  return t.evaluate(x);
}

inline StatResult avg_lr(std::span<const double> x, const TestStatistic& t) {
  if (t.kind != StatKind::avg_lr)
    throw std::invalid_argument("avg_lr: statistic kind mismatch");
  return t.evaluate(x);
}

inline double max_lr_location(std::span<const double> x, const Base1D& f,
                              const Base1D& g) {
  TestStatistic t = make_max_location_lr(f, g, static_cast<int>(x.size()));
  return t.evaluate(x).value;
}

inline double max_lr_scale(std::span<const double> x, const Base1D& f,
                           const Base1D& g) {
  TestStatistic t = make_max_scale_lr(f, g, static_cast<int>(x.size()));
  return t.evaluate(x).value;
}

}  // namespace lrt
