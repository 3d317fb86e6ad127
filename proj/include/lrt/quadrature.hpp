#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "lrt/log_sum_exp.hpp"

// Adaptive Gauss-Kronrod (7-15) quadrature with worst-panel-first
// refinement, plus change-of-variable helpers for integrals over the whole
// real line (theta = center + scale*tan(t)) and over scale parameters
// (nu = e^u, which turns nu^(n-1) dnu into e^(n*u) du).
//
// The log_* wrappers integrate exp(log_f) after factoring out the largest
// log value seen on a probe grid, so integrands built from log-densities
// stay in range even when the linear-scale values underflow.

namespace lrt {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = std::numeric_limits<double>::infinity();
  int panels = 0;
  bool converged = false;
};

namespace detail {

// Kronrod-15 abscissae (positive half) and weights; Gauss-7 weights sit on
// the odd-indexed nodes. Standard QUADPACK constants.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
};

// One G7K15 evaluation over [a,b].
template <typename F>
Panel gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[15];
  const double fc = f(center);
  fv[7] = fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    fv[i] = f(center - dx);
    fv[14 - i] = f(center + dx);
  }

  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  for (int i = 0; i < 7; ++i) {
    const double sum = fv[i] + fv[14 - i];
    resk += kWgk[i] * sum;
    resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    if (i % 2 == 1) resg += kWg[i / 2] * sum;
  }

  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

  resk *= half;
  resg *= half;
  resasc *= half;
  resabs *= half;

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);

  return Panel{a, b, resk, err};
}

}  // namespace detail

// Integrate f over [a,b]. Optional breakpoints seed the initial subdivision
// (they should bracket any sharp features, e.g. narrow likelihood peaks);
// they are clamped to (a,b) and deduplicated.
template <typename F>
QuadResult integrate_adaptive(F&& f, double a, double b,
                              const QuadratureSpec& spec = {},
                              std::span<const double> breakpoints = {}) {
  QuadResult out;
  if (!(a < b)) {
    out.value = 0.0;
    out.error = 0.0;
    out.converged = true;
    return out;
  }

  std::vector<double> edges;
  edges.push_back(a);
  for (double t : breakpoints)
    if (t > a && t < b) edges.push_back(t);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) {
                            return std::abs(x - y) <=
                                   1e-14 * (std::abs(x) + std::abs(y) + 1.0);
                          }),
              edges.end());

  std::vector<detail::Panel> panels;
  panels.reserve(64);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    panels.push_back(detail::gk15(f, edges[i], edges[i + 1]));

  auto totals = [&panels]() {
    double v = 0.0, e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();
  int splits = 0;
  while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) &&
         splits < spec.max_subdivisions) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].error > panels[worst].error) worst = i;
    const detail::Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) break;  // interval exhausted
    panels[worst] = detail::gk15(f, p.a, mid);
    panels.push_back(detail::gk15(f, mid, p.b));
    ++splits;
    std::tie(value, error) = totals();
  }

  // Accumulate in position order so the result does not depend on the
  // refinement history representation.
  std::sort(panels.begin(), panels.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  out.value = 0.0;
  out.error = 0.0;
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  out.panels = static_cast<int>(panels.size());
  out.converged =
      out.error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
  return out;
}

struct LogQuadResult {
  double log_value = kNegInf;  // log of the integral
  double rel_error = 0.0;      // error estimate / value
  int panels = 0;
  bool converged = true;
};

// log integral_{-inf}^{inf} exp(log_h(theta)) d(theta), computed through
// theta = center + scale*tan(t). theta_breaks seed panel edges at known
// features of the integrand (data points, likelihood peaks).
template <typename LogF>
LogQuadResult log_integrate_real_line(LogF&& log_h, const QuadratureSpec& spec,
                                      double center, double scale,
                                      std::span<const double> theta_breaks) {
  const double half_pi = std::numbers::pi / 2.0;

  std::vector<double> tbreaks;
  tbreaks.reserve(theta_breaks.size() + 17);
  for (double th : theta_breaks)
    if (std::isfinite(th)) tbreaks.push_back(std::atan((th - center) / scale));
  for (int k = 1; k < 16; ++k)  // coarse base grid
    tbreaks.push_back(-half_pi + k * (2.0 * half_pi / 16.0));

  auto log_integrand = [&](double t) {
    const double c = std::cos(t);
    const double theta = center + scale * std::tan(t);
    if (!std::isfinite(theta)) return kNegInf;
    const double lh = log_h(theta);
    if (lh == kNegInf) return kNegInf;
    return lh + std::log(scale) - 2.0 * std::log(std::abs(c));
  };

  // Peak scan: probe breakpoints plus a uniform grid, then factor the
  // maximum out of the exponent.
  double peak = kNegInf;
  for (double t : tbreaks) peak = std::max(peak, log_integrand(t));
  for (int k = 0; k < 129; ++k) {
    const double t = -half_pi + (k + 0.5) * (2.0 * half_pi / 129.0);
    peak = std::max(peak, log_integrand(t));
  }

  LogQuadResult out;
  if (peak == kNegInf) return out;  // integrand is identically ~0

  auto f = [&](double t) {
    const double li = log_integrand(t);
    return li == kNegInf ? 0.0 : std::exp(li - peak);
  };
  const QuadResult q =
      integrate_adaptive(f, -half_pi, half_pi, spec, tbreaks);
  out.panels = q.panels;
  out.converged = q.converged;
  if (q.value <= 0.0) {
    out.log_value = kNegInf;
    out.rel_error = q.error;
    return out;
  }
  out.log_value = peak + std::log(q.value);
  out.rel_error = q.error / q.value;
  return out;
}

// log integral_0^inf nu^(n-1) exp(log_h(nu)) d(nu) via nu = e^u.
// nu_breaks (positive) seed features such as the profile-likelihood peak.
template <typename LogF>
LogQuadResult log_integrate_scale(LogF&& log_h, int n,
                                  const QuadratureSpec& spec,
                                  std::span<const double> nu_breaks) {
  std::vector<double> ubreaks;
  ubreaks.reserve(nu_breaks.size());
  double ucenter = 0.0;
  for (double nu : nu_breaks)
    if (nu > 0.0 && std::isfinite(nu)) ubreaks.push_back(std::log(nu));
  if (!ubreaks.empty()) {
    std::vector<double> tmp = ubreaks;
    std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
    ucenter = tmp[tmp.size() / 2];
  }
  auto log_integrand_u = [&](double u) {
    const double nu = std::exp(u);
    if (nu == 0.0 || !std::isfinite(nu)) return kNegInf;
    const double lh = log_h(nu);
    if (lh == kNegInf) return kNegInf;
    return n * u + lh;
  };
  return log_integrate_real_line(log_integrand_u, spec, ucenter, 1.0, ubreaks);
}

}  // namespace lrt
