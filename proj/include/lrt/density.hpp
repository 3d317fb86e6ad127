#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrt/log_sum_exp.hpp"
#include "lrt/quadrature.hpp"
#include "lrt/rng.hpp"

// Sample spaces, 1-D density shapes, and evaluable+samplable densities.
// Everything is immutable after construction; all density arithmetic is in
// the log domain so products over n observations are sums of logs.

namespace lrt {

// shortest round-trip decimal text for labels
inline std::string num_label(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

enum class SpaceKind { UnitCube, UnitSquare, RealVector, PositiveVector };

struct SampleSpace {
  SpaceKind kind = SpaceKind::UnitCube;
  int n = 1;

  static SampleSpace unit_cube(int n) {
    require_dim(n);
    return {SpaceKind::UnitCube, n};
  }
  static SampleSpace unit_square() { return {SpaceKind::UnitSquare, 2}; }
  static SampleSpace real_vector(int n) {
    require_dim(n);
    return {SpaceKind::RealVector, n};
  }
  static SampleSpace positive_vector(int n) {
    require_dim(n);
    return {SpaceKind::PositiveVector, n};
  }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n) return false;
    for (double xi : x) {
      if (std::isnan(xi)) return false;
      switch (kind) {
        case SpaceKind::UnitCube:
        case SpaceKind::UnitSquare:
          if (!(xi > 0.0 && xi < 1.0)) return false;
          break;
        case SpaceKind::RealVector:
          if (!std::isfinite(xi)) return false;
          break;
        case SpaceKind::PositiveVector:
          if (!(xi > 0.0) || !std::isfinite(xi)) return false;
          break;
      }
    }
    return true;
  }

 private:
  static void require_dim(int n) {
    if (n < 1) throw std::invalid_argument("sample space dimension must be >= 1");
  }
};

enum class Curvature { convex, concave, neither };

// Density shape on (0,1). cdf/inv_cdf may be empty; bundled shapes provide
// closed forms so that power numbers have exact oracles.
struct Shape1D {
  std::string id;
  std::function<double(double)> log_f;    // -inf outside (0,1)
  std::function<double(double)> cdf;      // optional
  std::function<double(double)> inv_cdf;  // optional (used for sampling)
  bool monotone_increasing = false;
  Curvature curvature = Curvature::neither;

  double density(double x) const { return std::exp(log_f(x)); }
};

struct ShapeCheck {
  double integral = 0.0;
  bool normalized = false;
  bool monotone_ok = true;
  bool curvature_ok = true;
  bool pass() const { return normalized && monotone_ok && curvature_ok; }
};

// Grid checks for the declared shape flags: normalization to 1e-10,
// monotonicity on a 1e3-point grid, and the sign of second differences.
inline ShapeCheck verify_shape(const Shape1D& s) {
  ShapeCheck out;
  const QuadResult q = integrate_adaptive(
      [&](double x) { return s.density(x); }, 0.0, 1.0,
      QuadratureSpec{1e-12, 1e-12, 8000});
  out.integral = q.value;
  out.normalized = q.converged && std::abs(q.value - 1.0) <= 1e-10;

  const int grid = 1000;
  double prev = s.density(0.5 / grid);
  double prev_diff = 0.0;
  bool first_diff = true;
  for (int i = 1; i < grid; ++i) {
    const double x = (i + 0.5) / grid;
    const double fx = s.density(x);
    if (s.monotone_increasing && fx < prev - 1e-12) out.monotone_ok = false;
    const double diff = fx - prev;
    if (!first_diff && s.curvature != Curvature::neither) {
      const double second = diff - prev_diff;
      if (s.curvature == Curvature::convex && second < -1e-12)
        out.curvature_ok = false;
      if (s.curvature == Curvature::concave && second > 1e-12)
        out.curvature_ok = false;
    }
    prev_diff = diff;
    first_diff = false;
    prev = fx;
  }
  return out;
}

// Evaluable log-density plus a sampler drawing one point per call.
struct Density {
  SampleSpace space;
  std::string id;
  std::function<double(std::span<const double>)> log_pdf;
  std::function<void(rng::Sequence&, std::span<double>)> draw;
};

// log p(x); -inf exactly when x is off-support. Dimension mismatches and
// NaN coordinates are caller errors.
inline double log_density_at(const Density& d, std::span<const double> x) {
  if (static_cast<int>(x.size()) != d.space.n)
    throw std::invalid_argument("log_density_at: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(d.space.n) + ")");
  for (double xi : x)
    if (std::isnan(xi)) throw std::invalid_argument("log_density_at: NaN coordinate");
  if (!d.space.contains(x)) return kNegInf;
  return d.log_pdf(x);
}

// count i.i.d. draws; replicate i comes from stream.at(i), so the result is
// a pure function of (stream, count).
inline std::vector<std::vector<double>> sample(const Density& d,
                                               const rng::Stream& stream,
                                               std::int64_t count) {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    auto& pt = out[static_cast<std::size_t>(i)];
    pt.resize(static_cast<std::size_t>(d.space.n));
    rng::Sequence seq = stream.at(static_cast<std::uint64_t>(i));
    d.draw(seq, pt);
  }
  return out;
}

// x_i -> 1 - x_i. On points whose coordinates are odd multiples of 2^-53
// (which is what rng::Sequence::uniform emits) this is exact and involutive.
inline void reflect_into(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 1.0 - x[i];
}

inline std::vector<double> reflect(std::span<const double> x) {
  std::vector<double> out(x.size());
  reflect_into(x, out);
  return out;
}

inline Density uniform_cube_density(int n) {
  SampleSpace space = n == 2 ? SampleSpace::unit_square() : SampleSpace::unit_cube(n);
  return Density{
      space, "uniform",
      [space](std::span<const double> x) {
        return space.contains(x) ? 0.0 : kNegInf;
      },
      [](rng::Sequence& seq, std::span<double> out) {
        for (auto& v : out) v = seq.uniform();
      }};
}

// The symmetric alternatives p1(x) = prod f(x_i), p2(x) = prod f(1-x_i);
// p2 is evaluated and sampled literally through the reflection of p1.
struct SymmetricPair {
  Shape1D shape;
  int n = 1;
  Density p1, p2;
};

inline SymmetricPair make_symmetric_pair(const Shape1D& shape, int n) {
  if (n < 1) throw std::invalid_argument("make_symmetric_pair: n must be >= 1");
  if (!shape.inv_cdf)
    throw std::invalid_argument("make_symmetric_pair: shape has no sampler (inv_cdf)");
  const ShapeCheck chk = verify_shape(shape);
  if (!chk.pass())
    throw std::invalid_argument(
        "make_symmetric_pair: shape '" + shape.id + "' failed verification (integral=" +
        std::to_string(chk.integral) + ")");

  SampleSpace space = n == 2 ? SampleSpace::unit_square() : SampleSpace::unit_cube(n);
  const Shape1D sh = shape;

  auto p1_log = [sh, space](std::span<const double> x) {
    if (!space.contains(x)) return kNegInf;
    double s = 0.0;
    for (double xi : x) s += sh.log_f(xi);
    return s;
  };
  auto p1_draw = [sh](rng::Sequence& seq, std::span<double> out) {
    for (auto& v : out) v = sh.inv_cdf(seq.uniform());
  };
  auto p2_log = [sh, space](std::span<const double> x) {
    if (!space.contains(x)) return kNegInf;
    double s = 0.0;
    for (double xi : x) s += sh.log_f(1.0 - xi);
    return s;
  };
  auto p2_draw = [sh](rng::Sequence& seq, std::span<double> out) {
    for (auto& v : out) v = 1.0 - sh.inv_cdf(seq.uniform());
  };

  SymmetricPair pair;
  pair.shape = shape;
  pair.n = n;
  pair.p1 = Density{space, "p1:" + shape.id, std::move(p1_log), std::move(p1_draw)};
  pair.p2 = Density{space, "p2:" + shape.id, std::move(p2_log), std::move(p2_draw)};
  return pair;
}

// The four bivariate alternatives p1 = f2(x,y), p2 = f2(1-x,y),
// p3 = f2(x,1-y), p4 = f2(1-x,1-y), with f2(x,y) = fx(x)*fy(y) strictly
// increasing in both variables.
struct QuadAlternatives {
  std::string id;
  Shape1D fx, fy;
  std::vector<Density> alts;  // p1..p4
};

inline QuadAlternatives make_quad_alternatives(const Shape1D& fx, const Shape1D& fy) {
  if (!fx.monotone_increasing || !fy.monotone_increasing)
    throw std::invalid_argument("make_quad_alternatives: marginals must be increasing");
  for (const Shape1D* s : {&fx, &fy})
    if (!verify_shape(*s).pass())
      throw std::invalid_argument("make_quad_alternatives: shape '" + s->id +
                                  "' failed verification");

  const SampleSpace space = SampleSpace::unit_square();
  QuadAlternatives quad;
  quad.id = "quad:" + fx.id + "*" + fy.id;
  quad.fx = fx;
  quad.fy = fy;

  // flip_x/flip_y select the reflected arguments.
  auto member = [&](bool flip_x, bool flip_y, std::string name) {
    const Shape1D sx = fx, sy = fy;
    auto log_pdf = [sx, sy, space, flip_x, flip_y](std::span<const double> x) {
      if (!space.contains(x)) return kNegInf;
      const double a = flip_x ? 1.0 - x[0] : x[0];
      const double b = flip_y ? 1.0 - x[1] : x[1];
      return sx.log_f(a) + sy.log_f(b);
    };
    auto draw = [sx, sy, flip_x, flip_y](rng::Sequence& seq, std::span<double> out) {
      const double a = sx.inv_cdf(seq.uniform());
      const double b = sy.inv_cdf(seq.uniform());
      out[0] = flip_x ? 1.0 - a : a;
      out[1] = flip_y ? 1.0 - b : b;
    };
    return Density{space, std::move(name), std::move(log_pdf), std::move(draw)};
  };

  quad.alts.push_back(member(false, false, "p1:" + quad.id));
  quad.alts.push_back(member(true, false, "p2:" + quad.id));
  quad.alts.push_back(member(false, true, "p3:" + quad.id));
  quad.alts.push_back(member(true, true, "p4:" + quad.id));
  return quad;
}

// 1-D base density for location/scale families, on R or on (0,inf).
struct Base1D {
  std::string id;
  std::function<double(double)> log_f;
  std::function<double(rng::Sequence&)> draw;
  std::function<double(double)> cdf;  // for sampler verification
  bool positive_support = false;
  bool log_concave = true;  // single golden search suffices for the MLE
};

struct LocationFamily {
  Base1D base;
  int n = 1;
  double theta = 0.0;
};

// Joint density prod base(x_i - theta) on R^n.
inline Density location_density(const LocationFamily& fam) {
  if (fam.n < 1) throw std::invalid_argument("location_density: n must be >= 1");
  if (fam.base.positive_support)
    throw std::invalid_argument("location_density: base must live on the real line");
  const SampleSpace space = SampleSpace::real_vector(fam.n);
  const Base1D base = fam.base;
  const double theta = fam.theta;
  return Density{
      space,
      base.id + "(theta=" + num_label(theta) + ",n=" + std::to_string(fam.n) + ")",
      [base, theta, space](std::span<const double> x) {
        if (!space.contains(x)) return kNegInf;
        double s = 0.0;
        for (double xi : x) s += base.log_f(xi - theta);
        return s;
      },
      [base, theta](rng::Sequence& seq, std::span<double> out) {
        for (auto& v : out) v = theta + base.draw(seq);
      }};
}

struct ScaleFamily {
  Base1D base;
  int n = 1;
  double tau = 1.0;
};

// Joint density tau^-n prod base(x_i / tau) on (0,inf)^n.
inline Density scale_density(const ScaleFamily& fam) {
  if (fam.n < 1) throw std::invalid_argument("scale_density: n must be >= 1");
  if (!(fam.tau > 0.0)) throw std::invalid_argument("scale_density: tau must be > 0");
  if (!fam.base.positive_support)
    throw std::invalid_argument(
        "scale_density: only the positive-support branch is bundled");
  const SampleSpace space = SampleSpace::positive_vector(fam.n);
  const Base1D base = fam.base;
  const double tau = fam.tau;
  const int n = fam.n;
  return Density{
      space,
      base.id + "(tau=" + num_label(tau) + ",n=" + std::to_string(fam.n) + ")",
      [base, tau, n, space](std::span<const double> x) {
        if (!space.contains(x)) return kNegInf;
        double s = -n * std::log(tau);
        for (double xi : x) s += base.log_f(xi / tau);
        return s;
      },
      [base, tau](rng::Sequence& seq, std::span<double> out) {
        for (auto& v : out) v = tau * base.draw(seq);
      }};
}

struct VerifyOptions {
  std::function<double(double)> cdf;  // enables the KS sampler check (1-D only)
  int ks_draws = 100000;
  std::uint64_t ks_seed = 0xC0FFEE;
  std::optional<std::pair<double, double>> truncation;  // for bounded-box checks
  QuadratureSpec quad{1e-12, 1e-12, 8000};
};

struct DensityReport {
  double integral = 0.0;
  double integral_error = 0.0;
  bool quadrature_converged = false;
  bool normalization_pass = false;
  double ks_stat = std::numeric_limits<double>::quiet_NaN();
  bool ks_pass = true;
  bool pass() const { return normalization_pass && ks_pass && quadrature_converged; }
};

// Checks that exp(log_pdf) integrates to 1 (1e-8 bounded supports, 1e-6
// truncated/unbounded) and, when a cdf is supplied, that the sampler's
// empirical CDF stays within KS distance 0.01 of it. Quadrature
// non-convergence is reported, not thrown.
inline DensityReport verify_density(const Density& d, const VerifyOptions& opt = {}) {
  DensityReport out;
  const int n = d.space.n;
  double tol = 1e-8;

  auto eval1 = [&](double x) {
    const double v[1] = {x};
    const double lp = d.log_pdf(std::span<const double>(v, 1));
    return lp == kNegInf ? 0.0 : std::exp(lp);
  };

  QuadResult q;
  switch (d.space.kind) {
    case SpaceKind::UnitCube: {
      if (n != 1)
        throw std::invalid_argument("verify_density: only 1-D/2-D supports");
      q = integrate_adaptive(eval1, 0.0, 1.0, opt.quad);
      break;
    }
    case SpaceKind::UnitSquare: {
      // iterated quadrature; inner tolerance one decade tighter
      QuadratureSpec inner = opt.quad;
      inner.abs_tol *= 0.1;
      auto outer = [&](double x) {
        return integrate_adaptive(
                   [&](double y) {
                     const double v[2] = {x, y};
                     const double lp = d.log_pdf(std::span<const double>(v, 2));
                     return lp == kNegInf ? 0.0 : std::exp(lp);
                   },
                   0.0, 1.0, inner)
            .value;
      };
      q = integrate_adaptive(outer, 0.0, 1.0, opt.quad);
      break;
    }
    case SpaceKind::RealVector: {
      if (n != 1)
        throw std::invalid_argument("verify_density: only 1-D unbounded supports");
      tol = 1e-6;
      if (opt.truncation) {
        q = integrate_adaptive(eval1, opt.truncation->first,
                               opt.truncation->second, opt.quad);
      } else {
        const double breaks[] = {-4.0, -1.0, 0.0, 1.0, 4.0};
        const LogQuadResult lq = log_integrate_real_line(
            [&](double x) {
              const double v[1] = {x};
              return d.log_pdf(std::span<const double>(v, 1));
            },
            opt.quad, 0.0, 1.0, breaks);
        q.value = std::exp(lq.log_value);
        q.error = lq.rel_error * q.value;
        q.converged = lq.converged;
      }
      break;
    }
    case SpaceKind::PositiveVector: {
      if (n != 1)
        throw std::invalid_argument("verify_density: only 1-D unbounded supports");
      tol = 1e-6;
      if (opt.truncation) {
        q = integrate_adaptive(eval1, opt.truncation->first,
                               opt.truncation->second, opt.quad);
      } else {
        const double breaks[] = {0.125, 0.5, 1.0, 2.0, 8.0};
        const LogQuadResult lq = log_integrate_scale(
            [&](double x) {
              const double v[1] = {x};
              return d.log_pdf(std::span<const double>(v, 1));
            },
            1, opt.quad, breaks);  // nu^0 dnu = plain measure
        q.value = std::exp(lq.log_value);
        q.error = lq.rel_error * q.value;
        q.converged = lq.converged;
      }
      break;
    }
  }

  out.integral = q.value;
  out.integral_error = q.error;
  out.quadrature_converged = q.converged;
  out.normalization_pass = q.converged && std::abs(q.value - 1.0) <= tol;

  if (opt.cdf && n == 1) {
    rng::Stream stream(opt.ks_seed, "verify-density-ks");
    std::vector<double> xs(static_cast<std::size_t>(opt.ks_draws));
    for (int i = 0; i < opt.ks_draws; ++i) {
      rng::Sequence seq = stream.at(static_cast<std::uint64_t>(i));
      double v;
      d.draw(seq, std::span<double>(&v, 1));
      xs[static_cast<std::size_t>(i)] = v;
    }
    std::sort(xs.begin(), xs.end());
    double dmax = 0.0;
    const double N = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double F = opt.cdf(xs[i]);
      dmax = std::max(dmax, std::abs((static_cast<double>(i) + 1.0) / N - F));
      dmax = std::max(dmax, std::abs(F - static_cast<double>(i) / N));
    }
    out.ks_stat = dmax;
    out.ks_pass = dmax < 0.01;
  }
  return out;
}

}  // namespace lrt
