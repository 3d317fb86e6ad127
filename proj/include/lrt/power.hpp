#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lrt/density.hpp"
#include "lrt/region1d.hpp"
#include "lrt/statistics.hpp"

// Monte Carlo calibration, power estimation, and paired duels.
//
// Determinism contract: every replicate draws from its own counter-derived
// Sequence, per-replicate results land at fixed indices (or in fixed-size
// block tallies), and reductions run in block order. Reports are therefore a
// pure function of (config, master seed) no matter how many workers run.

namespace lrt {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationInfo {
  std::int64_t replicates = 0;
  std::uint64_t stream_key = 0;
  double attained_size = 0.0;
  std::int64_t failures = 0;
};

// Decision rule: reject iff statistic(x) > critical_value (strict).
struct CalibratedTest {
  TestStatistic statistic;
  double alpha = 0.0;
  double critical_value = 0.0;
  CalibrationInfo calibration;

  bool rejects(std::span<const double> x) const {
    return statistic.evaluate(x).value > critical_value;
  }
};

struct PowerEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  std::uint64_t stream_key = 0;
  std::int64_t failures = 0;
};

enum class Verdict { a_dominates, b_dominates, tie_within_noise };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::a_dominates: return "a_dominates";
    case Verdict::b_dominates: return "b_dominates";
    case Verdict::tie_within_noise: return "tie_within_noise";
  }
  return "?";
}

// Paired power comparison on common random numbers. The paired standard
// error comes from the per-replicate decision differences (discordant
// counts), not from the two marginal estimates.
struct PairedComparison {
  std::string alternative_id;
  PowerEstimate power_a, power_b;
  double diff = 0.0;       // p_hat_a - p_hat_b
  double paired_se = 0.0;
  std::int64_t n10 = 0;    // a rejects, b does not
  std::int64_t n01 = 0;    // b rejects, a does not
  Verdict verdict = Verdict::tie_within_noise;
};

struct DuelReport {
  CalibratedTest test_a, test_b;
  PowerEstimate size_a, size_b;  // fresh-sample rejection rate under the null
  std::vector<PairedComparison> alternatives;
  double alpha = 0.0;
  std::int64_t n_calib = 0;
  std::int64_t n_power = 0;
};

namespace detail {

inline constexpr std::int64_t kBlockSize = 8192;  // fixed; never worker-dependent

// Runs fn(block_index, begin, end) over [0,n) in fixed blocks, distributed
// over `workers` threads pulling block ids from a shared counter.
template <typename Fn>
void parallel_blocks(std::int64_t n, int workers, Fn&& fn) {
  const std::int64_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  if (workers < 1) workers = 1;
  const int use = static_cast<int>(
      std::min<std::int64_t>(workers, std::max<std::int64_t>(nblocks, 1)));
  if (use == 1) {
    for (std::int64_t b = 0; b < nblocks; ++b)
      fn(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(use));
  for (int w = 0; w < use; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        fn(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
      }
    });
  for (auto& t : pool) t.join();
}

inline std::int64_t conservative_order_index(double alpha, std::int64_t n) {
  // ceil((1-alpha) n) with a nudge so that exactly-representable products do
  // not round up one extra order statistic.
  const double v = (1.0 - alpha) * static_cast<double>(n);
  std::int64_t k = static_cast<std::int64_t>(std::ceil(v - 1e-6));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return k;
}

}  // namespace detail

// Critical value = ceil((1-alpha) N)-th order statistic of the statistic over
// N null draws (conservative; strict ">" rejection). Statistic failures on
// more than 0.1% of draws abort the calibration.
inline CalibratedTest calibrate(const TestStatistic& stat, const Density& null,
                                double alpha, std::int64_t n,
                                const rng::Stream& stream, int workers = 1) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("calibrate: alpha must be in (0,1)");
  if (n < 1000) throw std::invalid_argument("calibrate: need at least 1000 replicates");

  std::vector<double> values(static_cast<std::size_t>(n));
  std::vector<std::int64_t> fail_blocks(
      static_cast<std::size_t>((n + detail::kBlockSize - 1) / detail::kBlockSize), 0);

  detail::parallel_blocks(n, workers, [&](std::int64_t b, std::int64_t i0, std::int64_t i1) {
    std::vector<double> pt(static_cast<std::size_t>(null.space.n));
    for (std::int64_t i = i0; i < i1; ++i) {
      rng::Sequence seq = stream.at(static_cast<std::uint64_t>(i));
      null.draw(seq, pt);
      const StatResult r = stat.evaluate(pt);
      if (r.failed) {
        values[static_cast<std::size_t>(i)] =
            std::numeric_limits<double>::quiet_NaN();
        ++fail_blocks[static_cast<std::size_t>(b)];
      } else {
        values[static_cast<std::size_t>(i)] = r.value;
      }
    }
  });

  std::int64_t failures = 0;
  for (std::int64_t f : fail_blocks) failures += f;
  if (failures * 1000 > n)
    throw CalibrationError("calibrate: statistic failed on " +
                           std::to_string(failures) + " of " +
                           std::to_string(n) + " null draws");

  std::vector<double> valid;
  valid.reserve(values.size());
  for (double v : values)
    if (!std::isnan(v)) valid.push_back(v);
  const std::int64_t nv = static_cast<std::int64_t>(valid.size());
  const std::int64_t k = detail::conservative_order_index(alpha, nv);
  std::nth_element(valid.begin(), valid.begin() + (k - 1), valid.end());
  const double critical = valid[static_cast<std::size_t>(k - 1)];

  std::int64_t above = 0;
  for (double v : valid)
    if (v > critical) ++above;

  CalibratedTest out;
  out.statistic = stat;
  out.alpha = alpha;
  out.critical_value = critical;
  out.calibration = {n, stream.key(),
                     static_cast<double>(above) / static_cast<double>(nv),
                     failures};
  return out;
}

// Rejection proportion over n draws from alt; failures count as
// non-rejections and are reported.
inline PowerEstimate estimate_power(const CalibratedTest& test, const Density& alt,
                                    std::int64_t n, const rng::Stream& stream,
                                    int workers = 1) {
  if (n < 1000)
    throw std::invalid_argument("estimate_power: need at least 1000 replicates");

  const std::int64_t nblocks = (n + detail::kBlockSize - 1) / detail::kBlockSize;
  std::vector<std::int64_t> rej(static_cast<std::size_t>(nblocks), 0);
  std::vector<std::int64_t> fail(static_cast<std::size_t>(nblocks), 0);

  detail::parallel_blocks(n, workers, [&](std::int64_t b, std::int64_t i0, std::int64_t i1) {
    std::vector<double> pt(static_cast<std::size_t>(alt.space.n));
    for (std::int64_t i = i0; i < i1; ++i) {
      rng::Sequence seq = stream.at(static_cast<std::uint64_t>(i));
      alt.draw(seq, pt);
      const StatResult r = test.statistic.evaluate(pt);
      if (r.failed)
        ++fail[static_cast<std::size_t>(b)];
      else if (r.value > test.critical_value)
        ++rej[static_cast<std::size_t>(b)];
    }
  });

  std::int64_t rejects = 0, failures = 0;
  for (std::size_t b = 0; b < rej.size(); ++b) {
    rejects += rej[b];
    failures += fail[b];
  }
  if (failures * 1000 > n)
    throw CalibrationError("estimate_power: statistic failed on " +
                           std::to_string(failures) + " draws");

  PowerEstimate out;
  out.n = n;
  out.stream_key = stream.key();
  out.failures = failures;
  out.p_hat = static_cast<double>(rejects) / static_cast<double>(n);
  out.std_error = std::sqrt(out.p_hat * (1.0 - out.p_hat) / static_cast<double>(n));
  return out;
}

namespace detail {

struct PairTally {
  std::int64_t n11 = 0, n10 = 0, n01 = 0, fail_a = 0, fail_b = 0;
};

// Evaluate both tests on the same draws (common random numbers).
inline PairTally paired_pass(const CalibratedTest& a, const CalibratedTest& b,
                             const Density& src, std::int64_t n,
                             const rng::Stream& stream, int workers) {
  const std::int64_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<PairTally> tallies(static_cast<std::size_t>(nblocks));
  parallel_blocks(n, workers, [&](std::int64_t blk, std::int64_t i0, std::int64_t i1) {
    std::vector<double> pt(static_cast<std::size_t>(src.space.n));
    PairTally& t = tallies[static_cast<std::size_t>(blk)];
    for (std::int64_t i = i0; i < i1; ++i) {
      rng::Sequence seq = stream.at(static_cast<std::uint64_t>(i));
      src.draw(seq, pt);
      const StatResult ra = a.statistic.evaluate(pt);
      const StatResult rb = b.statistic.evaluate(pt);
      if (ra.failed) ++t.fail_a;
      if (rb.failed) ++t.fail_b;
      const bool da = !ra.failed && ra.value > a.critical_value;
      const bool db = !rb.failed && rb.value > b.critical_value;
      if (da && db) ++t.n11;
      else if (da) ++t.n10;
      else if (db) ++t.n01;
    }
  });
  PairTally total;
  for (const auto& t : tallies) {
    total.n11 += t.n11;
    total.n10 += t.n10;
    total.n01 += t.n01;
    total.fail_a += t.fail_a;
    total.fail_b += t.fail_b;
  }
  return total;
}

inline PowerEstimate estimate_from_tally(std::int64_t rejects, std::int64_t failures,
                                         std::int64_t n, std::uint64_t key) {
  PowerEstimate e;
  e.n = n;
  e.stream_key = key;
  e.failures = failures;
  e.p_hat = static_cast<double>(rejects) / static_cast<double>(n);
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
  return e;
}

}  // namespace detail

// For n=1 statistics that are monotone in d = |x - 1/2| (all the bundled
// symmetric-pair statistics are): recover the rejection region in x-space
// from the calibrated critical value by bisecting the crossing point.
inline Region1D calibrated_region_n1(const CalibratedTest& test) {
  auto stat_at = [&](double d) {
    const double x[1] = {0.5 + d};
    return test.statistic.evaluate(x).value;
  };
  const double d_lo = 1e-9, d_hi = 0.5 - 1e-9;
  const bool increasing = stat_at(d_hi) > stat_at(d_lo);
  const double c = test.critical_value;

  auto rejects_at = [&](double d) { return stat_at(d) > c; };
  if (increasing) {
    if (rejects_at(d_lo)) return Region1D{{{0.0, 1.0}}};
    if (!rejects_at(d_hi)) return Region1D{{}};
  } else {
    if (rejects_at(d_hi)) return Region1D{{{0.0, 1.0}}};
    if (!rejects_at(d_lo)) return Region1D{{}};
  }
  double lo = d_lo, hi = d_hi;  // bracket the crossing
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool r = rejects_at(mid);
    if (r == increasing)
      hi = mid;
    else
      lo = mid;
  }
  const double d_star = 0.5 * (lo + hi);
  if (increasing)
    return Region1D{{{0.0, 0.5 - d_star}, {0.5 + d_star, 1.0}}};
  return Region1D{{{0.5 - d_star, 0.5 + d_star}}};
}

// Calibrates both statistics on the same null draws, then compares their
// power on shared alternative draws. Verdicts are 3-paired-SE calls; an
// exact tie (identical decisions everywhere) reports tie_within_noise.
inline DuelReport duel(const TestStatistic& stat_a, const TestStatistic& stat_b,
                       const Density& null, std::span<const Density> alts,
                       double alpha, std::int64_t n_calib, std::int64_t n_power,
                       const rng::Stream& master, int workers = 1,
                       std::int64_t n_size = 0) {
  if (alts.empty()) throw std::invalid_argument("duel: no alternatives");
  if (n_size <= 0) n_size = n_power;

  const rng::Stream calib_stream = master.substream("calibrate");
  DuelReport report;
  report.alpha = alpha;
  report.n_calib = n_calib;
  report.n_power = n_power;
  report.test_a = calibrate(stat_a, null, alpha, n_calib, calib_stream, workers);
  report.test_b = calibrate(stat_b, null, alpha, n_calib, calib_stream, workers);

  auto guard_failures = [](const detail::PairTally& t, std::int64_t n,
                           const char* what) {
    if (t.fail_a * 1000 > n || t.fail_b * 1000 > n)
      throw CalibrationError(std::string("duel: statistic failed on ") +
                             std::to_string(std::max(t.fail_a, t.fail_b)) +
                             " of " + std::to_string(n) + " " + what + " draws");
  };

  const rng::Stream size_stream = master.substream("size");
  const detail::PairTally st = detail::paired_pass(
      report.test_a, report.test_b, null, n_size, size_stream, workers);
  guard_failures(st, n_size, "size");
  report.size_a = detail::estimate_from_tally(st.n11 + st.n10, st.fail_a, n_size,
                                              size_stream.key());
  report.size_b = detail::estimate_from_tally(st.n11 + st.n01, st.fail_b, n_size,
                                              size_stream.key());

  for (std::size_t j = 0; j < alts.size(); ++j) {
    const rng::Stream power_stream =
        master.substream("power", static_cast<std::uint64_t>(j));
    const detail::PairTally t = detail::paired_pass(
        report.test_a, report.test_b, alts[j], n_power, power_stream, workers);
    guard_failures(t, n_power, "power");

    PairedComparison cmp;
    cmp.alternative_id = alts[j].id;
    cmp.power_a = detail::estimate_from_tally(t.n11 + t.n10, t.fail_a, n_power,
                                              power_stream.key());
    cmp.power_b = detail::estimate_from_tally(t.n11 + t.n01, t.fail_b, n_power,
                                              power_stream.key());
    cmp.n10 = t.n10;
    cmp.n01 = t.n01;
    const double n = static_cast<double>(n_power);
    cmp.diff = static_cast<double>(t.n10 - t.n01) / n;
    const double var = static_cast<double>(t.n10 + t.n01) / n - cmp.diff * cmp.diff;
    cmp.paired_se = var > 0.0 ? std::sqrt(var / n) : 0.0;
    if (cmp.diff > 3.0 * cmp.paired_se && cmp.diff > 0.0)
      cmp.verdict = Verdict::a_dominates;
    else if (cmp.diff < -3.0 * cmp.paired_se && cmp.diff < 0.0)
      cmp.verdict = Verdict::b_dominates;
    else
      cmp.verdict = Verdict::tie_within_noise;
    report.alternatives.push_back(std::move(cmp));
  }
  return report;
}

}  // namespace lrt
