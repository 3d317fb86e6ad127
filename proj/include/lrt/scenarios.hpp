#pragma once

#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lrt/config.hpp"
#include "lrt/discrete.hpp"
#include "lrt/families.hpp"
#include "lrt/invariance.hpp"
#include "lrt/power.hpp"
#include "lrt/report.hpp"

// The canned reproduction scenarios. Each runner builds its problem from the
// bundled registries, runs the Monte Carlo (or exact oracle) pipeline, and
// evaluates a fixed list of deterministic pass/fail checks with thresholds
// pinned here. Emitted file contents are a pure function of (config, seed);
// wall-clock time is measured by the caller and kept out of the files.

namespace lrt {

struct ScenarioOverrides {
  std::optional<double> alpha;
  std::optional<std::int64_t> n_calib;
  std::optional<std::int64_t> n_power;
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0 = hardware concurrency
  QuadratureSpec quad{};
};

struct ScenarioResult {
  std::string id;
  double alpha = 0.0;
  std::int64_t n_calib = 0;
  std::int64_t n_power = 0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> files;  // name -> contents
  std::vector<std::pair<std::string, std::uint64_t>> substreams;
  std::vector<DuelReport> duels;  // kept for programmatic consumers

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace scenario_detail {

inline int effective_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

struct Defaults {
  double alpha;
  std::int64_t n_calib;
  std::int64_t n_power;
};

inline Defaults scenario_defaults(const std::string& id) {
  if (id == "convex-n1" || id == "concave-n1") return {0.1, 4000000, 1000000};
  if (id == "symmetric-n5") return {0.1, 200000, 1000000};
  if (id == "quad-bivariate") return {0.1, 200000, 1000000};
  if (id == "location-normal-vs-cauchy") return {0.05, 200000, 200000};
  if (id == "scale-exp-vs-halfnormal") return {0.05, 200000, 200000};
  if (id == "discrete-oracle") return {0.2, 200000, 1000000};
  throw std::invalid_argument("unknown scenario '" + id +
                              "' (valid: " + scenario_id_list() + ")");
}

inline void add_check(ScenarioResult& r, std::string name, bool pass,
                      std::string detail) {
  r.checks.push_back({std::move(name), pass, std::move(detail)});
}

// size check shared by every duel scenario: fresh rejection rate under the
// null within 3 SE of the attained calibrated size. The SE of the difference
// has two parts: fresh-sample noise and the calibration quantile noise (the
// attained size is an in-sample quantity; the true size of the calibrated
// test wobbles around it at the sqrt(alpha(1-alpha)/n_calib) scale).
inline void size_checks(ScenarioResult& r, const DuelReport& d,
                        const std::string& tag) {
  auto one = [&](const CalibratedTest& t, const PowerEstimate& fresh,
                 const char* role) {
    const double s = t.calibration.attained_size;
    const double se_calib =
        std::sqrt(s * (1.0 - s) / static_cast<double>(t.calibration.replicates));
    const double se = std::hypot(fresh.std_error, se_calib);
    const double gap = std::abs(fresh.p_hat - s);
    const double tol = 3.0 * se;
    add_check(r, "size-" + tag + role, gap <= tol,
              "attained=" + fmt9(s) + " fresh=" + fmt9(fresh.p_hat) +
                  " tol=" + fmt9(tol));
  };
  one(d.test_a, d.size_a, "a");
  one(d.test_b, d.size_b, "b");
}

inline void dominance_checks(ScenarioResult& r, const DuelReport& d,
                             const std::string& tag) {
  for (const auto& cmp : d.alternatives) {
    const double floor = -3.0 * cmp.paired_se;
    add_check(r, "dominance-" + tag + cmp.alternative_id, cmp.diff >= floor,
              "diff=" + fmt9(cmp.diff) + " floor=" + fmt9(floor));
  }
}

inline ojson duel_bundle_json(const std::string& scenario, double alpha,
                              std::int64_t n_calib, std::int64_t n_power,
                              std::uint64_t seed,
                              const std::vector<std::pair<ojson, const DuelReport*>>& duels) {
  ojson j;
  j["scenario"] = scenario;
  j["alpha"] = alpha;
  j["n_calib"] = n_calib;
  j["n_power"] = n_power;
  j["seed"] = seed;
  j["duels"] = ojson::array();
  for (const auto& [meta, rep] : duels) {
    ojson d = duel_report_json(*rep);
    d["problem"] = meta;
    j["duels"].push_back(d);
  }
  return j;
}

inline std::string duel_bundle_csv(const std::vector<const DuelReport*>& duels) {
  std::string csv = kDuelCsvHeader;
  for (const DuelReport* d : duels) append_duel_csv_rows(csv, *d);
  return csv;
}

// --------------------------------------------------------------------------
// n = 1 scenarios: closed-form oracles plus Monte Carlo agreement

inline ScenarioResult run_n1(const std::string& id, const Shape1D& shape,
                             const ScenarioOverrides& ov) {
  const Defaults def = scenario_defaults(id);
  ScenarioResult r;
  r.id = id;
  r.alpha = ov.alpha.value_or(def.alpha);
  r.n_calib = ov.n_calib.value_or(def.n_calib);
  r.n_power = ov.n_power.value_or(def.n_power);
  r.seed = ov.seed.value_or(kDefaultSeed);
  const int workers = effective_workers(ov.workers);

  const auto pair = make_symmetric_pair(shape, 1);
  const Density null = uniform_cube_density(1);
  const std::vector<Density> alts = {pair.p1, pair.p2};
  const auto avg = make_avg_lr(null, alts);
  const auto max = make_max_lr(null, alts);

  rng::Stream master(r.seed, "scenario:" + id);
  const DuelReport d =
      duel(avg, max, null, alts, r.alpha, r.n_calib, r.n_power, master, workers);
  r.duels.push_back(d);
  for (const char* name : {"calibrate", "size"})
    r.substreams.emplace_back(name, master.substream(name).key());
  for (std::uint64_t j = 0; j < alts.size(); ++j)
    r.substreams.emplace_back("power:" + std::to_string(j),
                              master.substream("power", j).key());

  // exact oracle values from the closed-form CDF
  const auto regions = analytic_region_n1(shape, r.alpha);
  const double exact_max = exact_power_n1(shape, regions.max_lr);
  const double exact_avg = exact_power_n1(shape, regions.avg_lr);

  // calibrated regions in x-space
  const Region1D reg_avg = calibrated_region_n1(d.test_a);
  const Region1D reg_max = calibrated_region_n1(d.test_b);
  const double se_c =
      std::sqrt(r.alpha * (1.0 - r.alpha) / static_cast<double>(r.n_calib)) / 2.0;
  const double endpoint_tol = 5.0 * se_c + 1e-9;

  auto region_gap = [](const Region1D& a, const Region1D& b) {
    if (a.intervals.size() != b.intervals.size()) return 1.0;
    double gap = 0.0;
    for (std::size_t i = 0; i < a.intervals.size(); ++i) {
      gap = std::max(gap, std::abs(a.intervals[i].lo - b.intervals[i].lo));
      gap = std::max(gap, std::abs(a.intervals[i].hi - b.intervals[i].hi));
    }
    return gap;
  };

  if (id == "concave-n1") {
    add_check(r, "oracle-max-power-below-alpha", exact_max < r.alpha,
              "exact=" + fmt9(exact_max) + " alpha=" + fmt9(r.alpha));
    add_check(r, "oracle-avg-beats-max", exact_avg > exact_max,
              "avg=" + fmt9(exact_avg) + " max=" + fmt9(exact_max));
    for (const auto& cmp : d.alternatives) {
      add_check(r, "mc-avg-power-3se-" + cmp.alternative_id,
                std::abs(cmp.power_a.p_hat - exact_avg) <= 3.0 * cmp.power_a.std_error,
                "mc=" + fmt9(cmp.power_a.p_hat) + " exact=" + fmt9(exact_avg) +
                    " tol=" + fmt9(3.0 * cmp.power_a.std_error));
      add_check(r, "mc-max-power-3se-" + cmp.alternative_id,
                std::abs(cmp.power_b.p_hat - exact_max) <= 3.0 * cmp.power_b.std_error,
                "mc=" + fmt9(cmp.power_b.p_hat) + " exact=" + fmt9(exact_max) +
                    " tol=" + fmt9(3.0 * cmp.power_b.std_error));
      add_check(r, "verdict-a-dominates-" + cmp.alternative_id,
                cmp.verdict == Verdict::a_dominates, verdict_name(cmp.verdict));
      const double gap = exact_avg - exact_max;
      add_check(r, "paired-gap-3se-" + cmp.alternative_id,
                std::abs(cmp.diff - gap) <= 3.0 * cmp.paired_se,
                "diff=" + fmt9(cmp.diff) + " oracle=" + fmt9(gap) +
                    " tol=" + fmt9(3.0 * cmp.paired_se));
    }
  } else {  // convex-n1
    add_check(r, "oracle-regions-coincide",
              region_gap(regions.max_lr, regions.avg_lr) == 0.0,
              "analytic max and avg regions are identical");
    for (const auto& cmp : d.alternatives)
      add_check(r, "verdict-tie-" + cmp.alternative_id,
                cmp.verdict == Verdict::tie_within_noise &&
                    cmp.diff == 0.0 && cmp.n10 == 0 && cmp.n01 == 0,
                std::string(verdict_name(cmp.verdict)) + " diff=" + fmt9(cmp.diff));
    add_check(r, "regions-coincide-mc", region_gap(reg_avg, reg_max) <= 1e-9,
              "gap=" + fmt9(region_gap(reg_avg, reg_max)));
  }

  add_check(r, "region-max-endpoints",
            region_gap(reg_max, regions.max_lr) <= endpoint_tol,
            "gap=" + fmt9(region_gap(reg_max, regions.max_lr)) +
                " tol=" + fmt9(endpoint_tol));
  add_check(r, "region-avg-endpoints",
            region_gap(reg_avg, regions.avg_lr) <= endpoint_tol,
            "gap=" + fmt9(region_gap(reg_avg, regions.avg_lr)) +
                " tol=" + fmt9(endpoint_tol));
  size_checks(r, d, "");

  ojson meta;
  meta["type"] = "symmetric-pair";
  meta["shape"] = shape.id;
  meta["n"] = 1;
  r.files["duel.json"] =
      duel_bundle_json(id, r.alpha, r.n_calib, r.n_power, r.seed, {{meta, &d}})
          .dump(2) + "\n";
  r.files["duel.csv"] = duel_bundle_csv({&d});

  ojson rj;
  rj["alpha"] = r.alpha;
  rj["endpoint_tolerance"] = endpoint_tol;
  rj["analytic"] = ojson::object();
  rj["analytic"]["max_lr"] = region_json(regions.max_lr);
  rj["analytic"]["avg_lr"] = region_json(regions.avg_lr);
  rj["calibrated"] = ojson::object();
  rj["calibrated"]["max_lr"] = region_json(reg_max);
  rj["calibrated"]["avg_lr"] = region_json(reg_avg);
  rj["exact_power"] = ojson::object();
  rj["exact_power"]["max_lr"] = exact_max;
  rj["exact_power"]["avg_lr"] = exact_avg;
  r.files["regions.json"] = rj.dump(2) + "\n";
  return r;
}

// --------------------------------------------------------------------------
// n = 5 symmetric pairs, both shapes: paired dominance duels

inline ScenarioResult run_symmetric_n5(const ScenarioOverrides& ov) {
  const std::string id = "symmetric-n5";
  const Defaults def = scenario_defaults(id);
  ScenarioResult r;
  r.id = id;
  r.alpha = ov.alpha.value_or(def.alpha);
  r.n_calib = ov.n_calib.value_or(def.n_calib);
  r.n_power = ov.n_power.value_or(def.n_power);
  r.seed = ov.seed.value_or(kDefaultSeed);
  const int workers = effective_workers(ov.workers);

  rng::Stream master(r.seed, "scenario:" + id);
  std::vector<std::pair<ojson, const DuelReport*>> bundle;
  std::vector<const DuelReport*> csv_list;

  int duel_index = 0;
  for (const Shape1D& shape : {shape_convex_3x2(), shape_concave_sqrt()}) {
    const auto pair = make_symmetric_pair(shape, 5);
    const Density null = uniform_cube_density(5);
    const std::vector<Density> alts = {pair.p1, pair.p2};
    const auto avg = make_avg_lr(null, alts);
    const auto max = make_max_lr(null, alts);
    const rng::Stream sub = master.substream("duel", static_cast<std::uint64_t>(duel_index));
    const DuelReport d =
        duel(avg, max, null, alts, r.alpha, r.n_calib, r.n_power, sub, workers);
    r.duels.push_back(d);
    ++duel_index;
  }

  for (std::size_t k = 0; k < r.duels.size(); ++k) {
    const std::string tag = k == 0 ? "convex-" : "concave-";
    const DuelReport& d = r.duels[k];
    dominance_checks(r, d, tag);
    size_checks(r, d, tag);
    // a reflection-symmetric test has the same power against p1 and p2
    const auto& a1 = d.alternatives[0];
    const auto& a2 = d.alternatives[1];
    const double se =
        std::sqrt(a1.power_a.std_error * a1.power_a.std_error +
                  a2.power_a.std_error * a2.power_a.std_error);
    add_check(r, "power-symmetry-" + tag + "avg",
              std::abs(a1.power_a.p_hat - a2.power_a.p_hat) <= 4.0 * se,
              "p1=" + fmt9(a1.power_a.p_hat) + " p2=" + fmt9(a2.power_a.p_hat));
    ojson meta;
    meta["type"] = "symmetric-pair";
    meta["shape"] = k == 0 ? "convex-3x2" : "concave-sqrt";
    meta["n"] = 5;
    bundle.push_back({meta, &r.duels[k]});
    csv_list.push_back(&r.duels[k]);
    r.substreams.emplace_back("duel:" + std::to_string(k),
                              master.substream("duel", k).key());
  }

  r.files["duel.json"] =
      duel_bundle_json(id, r.alpha, r.n_calib, r.n_power, r.seed, bundle).dump(2) + "\n";
  r.files["duel.csv"] = duel_bundle_csv(csv_list);
  return r;
}

// --------------------------------------------------------------------------
// four bivariate alternatives under the reflection group of the unit square

inline ScenarioResult run_quad_bivariate(const ScenarioOverrides& ov) {
  const std::string id = "quad-bivariate";
  const Defaults def = scenario_defaults(id);
  ScenarioResult r;
  r.id = id;
  r.alpha = ov.alpha.value_or(def.alpha);
  r.n_calib = ov.n_calib.value_or(def.n_calib);
  r.n_power = ov.n_power.value_or(def.n_power);
  r.seed = ov.seed.value_or(kDefaultSeed);
  const int workers = effective_workers(ov.workers);

  const auto quad = quad_alternatives_9x2y2();
  const Density null = uniform_cube_density(2);
  const auto avg = make_avg_lr(null, quad.alts);
  const auto max = make_max_lr(null, quad.alts);

  rng::Stream master(r.seed, "scenario:" + id);
  const DuelReport d =
      duel(avg, max, null, quad.alts, r.alpha, r.n_calib, r.n_power, master, workers);
  r.duels.push_back(d);
  for (const char* name : {"calibrate", "size"})
    r.substreams.emplace_back(name, master.substream(name).key());
  for (std::uint64_t j = 0; j < quad.alts.size(); ++j)
    r.substreams.emplace_back("power:" + std::to_string(j),
                              master.substream("power", j).key());

  dominance_checks(r, d, "");
  size_checks(r, d, "");

  const GroupAction g = group_by_id("reflect-2d-quad");
  const auto perms = induced_permutations(g, quad.alts);
  add_check(r, "group-transitive", is_transitive(perms, 4),
            "induced permutation group over the four alternatives");

  ojson meta;
  meta["type"] = "quad-bivariate";
  meta["f2"] = "quad-9x2y2";
  meta["group"] = "reflect-2d-quad";
  r.files["duel.json"] =
      duel_bundle_json(id, r.alpha, r.n_calib, r.n_power, r.seed, {{meta, &d}})
          .dump(2) + "\n";
  r.files["duel.csv"] = duel_bundle_csv({&d});
  return r;
}

// --------------------------------------------------------------------------
// Section 4: integrated vs profiled LR for location and scale families

inline ScenarioResult run_family_duel(const std::string& id,
                                      const ScenarioOverrides& ov) {
  const bool location = id == "location-normal-vs-cauchy";
  const Defaults def = scenario_defaults(id);
  ScenarioResult r;
  r.id = id;
  r.alpha = ov.alpha.value_or(def.alpha);
  r.n_calib = ov.n_calib.value_or(def.n_calib);
  r.n_power = ov.n_power.value_or(def.n_power);
  r.seed = ov.seed.value_or(kDefaultSeed);
  const int workers = effective_workers(ov.workers);
  const int n = 3;

  const Base1D f = location ? base_normal() : base_exponential();
  const Base1D g = location ? base_cauchy() : base_half_normal();
  const Density null =
      location ? location_density({f, n, 0.0}) : scale_density({f, n, 1.0});
  const Density alt =
      location ? location_density({g, n, 0.0}) : scale_density({g, n, 1.0});
  const std::vector<Density> alts = {alt};

  const TestStatistic integrated =
      location ? make_integrated_location_lr(f, g, n, ov.quad)
               : make_integrated_scale_lr(f, g, n, ov.quad);
  const TestStatistic profiled =
      location ? make_max_location_lr(f, g, n) : make_max_scale_lr(f, g, n);

  rng::Stream master(r.seed, "scenario:" + id);
  const DuelReport d = duel(integrated, profiled, null, alts, r.alpha, r.n_calib,
                            r.n_power, master, workers);
  r.duels.push_back(d);
  for (const char* name : {"calibrate", "size"})
    r.substreams.emplace_back(name, master.substream(name).key());
  r.substreams.emplace_back("power:0", master.substream("power", 0).key());

  dominance_checks(r, d, "");
  size_checks(r, d, "");

  // quadrature vs closed form on 100 random null inputs
  const rng::Stream qstream = master.substream("quadcheck");
  r.substreams.emplace_back("quadcheck", qstream.key());
  double worst_den = 0.0, worst_num = 0.0;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < 100; ++i) {
    rng::Sequence seq = qstream.at(static_cast<std::uint64_t>(i));
    null.draw(seq, x);
    if (location) {
      const auto ir = integrated_lr_location(x, f, g, ov.quad);
      double mean = 0.0;
      for (double xi : x) mean += xi;
      mean /= n;
      double s = 0.0;
      for (double xi : x) s += (xi - mean) * (xi - mean);
      const double closed = -0.5 * (n - 1.0) * std::log(2.0 * std::numbers::pi) -
                            0.5 * std::log(static_cast<double>(n)) - 0.5 * s;
      worst_den = std::max(worst_den, std::abs(ir.log_den - closed));
    } else {
      const auto ir = integrated_lr_scale(x, f, g, ov.quad);
      double t = 0.0, q = 0.0;
      for (double xi : x) {
        t += xi;
        q += xi * xi;
      }
      const double closed_den = std::lgamma(static_cast<double>(n)) -
                                n * std::log(t);  // Gamma(n) / T^n
      const double closed_num =
          0.5 * n * std::log(2.0 / std::numbers::pi) +
          (0.5 * n - 1.0) * std::log(2.0) + std::lgamma(0.5 * n) -
          0.5 * n * std::log(q);
      worst_den = std::max(worst_den, std::abs(ir.log_den - closed_den));
      worst_num = std::max(worst_num, std::abs(ir.log_num - closed_num));
    }
  }
  add_check(r, "quad-closed-form-100", worst_den <= 1e-8 && worst_num <= 1e-8,
            "max |log error| den=" + fmt9(worst_den) + " num=" + fmt9(worst_num) +
                " tol=1e-8");

  ojson meta;
  meta["type"] = location ? "location" : "scale";
  meta["f_base"] = f.id;
  meta["g_base"] = g.id;
  meta["n"] = n;
  r.files["duel.json"] =
      duel_bundle_json(id, r.alpha, r.n_calib, r.n_power, r.seed, {{meta, &d}})
          .dump(2) + "\n";
  r.files["duel.csv"] = duel_bundle_csv({&d});

  ojson qj;
  qj["count"] = 100;
  qj["tolerance"] = 1e-8;
  qj["max_abs_log_error_denominator"] = worst_den;
  if (!location) qj["max_abs_log_error_numerator"] = worst_num;
  qj["pass"] = worst_den <= 1e-8 && worst_num <= 1e-8;
  r.files["quadcheck.json"] = qj.dump(2) + "\n";
  return r;
}

// --------------------------------------------------------------------------
// exact oracle on the m = 10 discretization

inline ScenarioResult run_discrete_oracle(const ScenarioOverrides& ov) {
  const std::string id = "discrete-oracle";
  ScenarioResult r;
  r.id = id;
  r.alpha = ov.alpha.value_or(scenario_defaults(id).alpha);
  r.n_calib = 0;
  r.n_power = 0;
  r.seed = ov.seed.value_or(kDefaultSeed);

  ojson cases = ojson::array();
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
      const bool equal = inv.best.cells == np.cells;
      const std::string tag = shape.id + "-alpha" + fmt9(alpha);
      add_check(r, "np-equals-invariant-" + tag, equal,
                "invariant power=" + fmt9(inv.best.power) +
                    " np power=" + fmt9(np.power));
      add_check(r, "avg-ordered-maximal-" + tag, inv.avg_ordered_is_maximal, "");

      ojson c;
      c["shape"] = shape.id;
      c["alpha"] = alpha;
      ojson bj;
      bj["cells"] = inv.best.cells;
      bj["null_mass"] = inv.best.null_mass;
      bj["power"] = inv.best.power;
      bj["per_alternative_power"] = inv.per_alt_power;
      c["best_invariant"] = bj;
      ojson nj;
      nj["cells"] = np.cells;
      nj["null_mass"] = np.null_mass;
      nj["power"] = np.power;
      c["np_mixture"] = nj;
      c["regions_equal"] = equal;
      cases.push_back(c);
    }
  }

  // s = 1 reduction: with no symmetry the invariant search is plain NP
  const auto single = discretize_single(shape_convex_3x2(), 10);
  const auto inv1 = best_invariant_region(single, 0.3);
  const auto np1 = np_region_discrete(single.p0, single.alts[0], 0.3);
  add_check(r, "np-s1-reduction", inv1.best.cells == np1.cells,
            "power=" + fmt9(np1.power));

  ojson oj;
  oj["scenario"] = id;
  oj["m"] = 10;
  oj["cases"] = cases;
  ojson s1;
  s1["shape"] = "convex-3x2";
  s1["alpha"] = 0.3;
  s1["cells"] = np1.cells;
  s1["equal"] = inv1.best.cells == np1.cells;
  oj["s1_reduction"] = s1;
  r.files["oracle.json"] = oj.dump(2) + "\n";
  return r;
}

}  // namespace scenario_detail

inline ScenarioResult run_scenario(const std::string& id,
                                   const ScenarioOverrides& ov = {}) {
  using namespace scenario_detail;
  ScenarioResult r;
  if (id == "convex-n1") r = run_n1(id, shape_convex_3x2(), ov);
  else if (id == "concave-n1") r = run_n1(id, shape_concave_sqrt(), ov);
  else if (id == "symmetric-n5") r = run_symmetric_n5(ov);
  else if (id == "quad-bivariate") r = run_quad_bivariate(ov);
  else if (id == "location-normal-vs-cauchy" || id == "scale-exp-vs-halfnormal")
    r = run_family_duel(id, ov);
  else if (id == "discrete-oracle") r = run_discrete_oracle(ov);
  else
    throw std::invalid_argument("unknown scenario '" + id +
                                "' (valid: " + scenario_id_list() + ")");

  ojson sj;
  sj["scenario"] = r.id;
  sj["alpha"] = r.alpha;
  sj["n_calib"] = r.n_calib;
  sj["n_power"] = r.n_power;
  sj["seed"] = r.seed;
  sj["all_pass"] = r.all_pass();
  sj["checks"] = checks_json(r.checks);
  r.files["summary.json"] = sj.dump(2) + "\n";
  return r;
}

// --------------------------------------------------------------------------
// Explicit (non-scenario) problems from a validated config.

struct ProblemSetup {
  Density null;
  std::vector<Density> alts;
  std::vector<TestStatistic> stats;  // in config order
  ojson meta;
};

inline ProblemSetup build_problem(const ExperimentConfig& cfg) {
  ProblemSetup p;
  p.meta = ojson::object();
  p.meta["type"] = cfg.problem;
  const QuadratureSpec quad = cfg.quad_spec();

  if (cfg.problem == "symmetric-pair") {
    const auto pair = make_symmetric_pair(shape_by_id(cfg.shape_id), cfg.n);
    p.null = uniform_cube_density(cfg.n);
    p.alts = {pair.p1, pair.p2};
    p.meta["shape"] = cfg.shape_id;
    p.meta["n"] = cfg.n;
  } else if (cfg.problem == "quad-bivariate") {
    const auto quad_alts = quad_alternatives_9x2y2();
    p.null = uniform_cube_density(2);
    p.alts = quad_alts.alts;
    p.meta["f2"] = "quad-9x2y2";
    p.meta["n"] = 2;
  } else if (cfg.problem == "location") {
    const Base1D f = base_by_id(cfg.f_base_id);
    const Base1D g = base_by_id(cfg.g_base_id);
    p.null = location_density({f, cfg.n, 0.0});
    p.alts = {location_density({g, cfg.n, 0.0})};
    p.meta["f_base"] = cfg.f_base_id;
    p.meta["g_base"] = cfg.g_base_id;
    p.meta["n"] = cfg.n;
  } else if (cfg.problem == "scale") {
    const Base1D f = base_by_id(cfg.f_base_id);
    const Base1D g = base_by_id(cfg.g_base_id);
    p.null = scale_density({f, cfg.n, 1.0});
    p.alts = {scale_density({g, cfg.n, 1.0})};
    p.meta["f_base"] = cfg.f_base_id;
    p.meta["g_base"] = cfg.g_base_id;
    p.meta["n"] = cfg.n;
  } else {
    throw std::invalid_argument("build_problem: unknown problem '" + cfg.problem + "'");
  }

  for (const auto& sid : cfg.statistic_ids) {
    if (sid == "max-lr") {
      if (cfg.problem == "location")
        p.stats.push_back(make_max_location_lr(base_by_id(cfg.f_base_id),
                                               base_by_id(cfg.g_base_id), cfg.n));
      else if (cfg.problem == "scale")
        p.stats.push_back(make_max_scale_lr(base_by_id(cfg.f_base_id),
                                            base_by_id(cfg.g_base_id), cfg.n));
      else
        p.stats.push_back(make_max_lr(p.null, p.alts));
    } else if (sid == "avg-lr") {
      p.stats.push_back(make_avg_lr(p.null, p.alts, cfg.weights));
    } else if (sid == "int-loc-lr") {
      p.stats.push_back(make_integrated_location_lr(
          base_by_id(cfg.f_base_id), base_by_id(cfg.g_base_id), cfg.n, quad));
    } else if (sid == "int-scale-lr") {
      p.stats.push_back(make_integrated_scale_lr(
          base_by_id(cfg.f_base_id), base_by_id(cfg.g_base_id), cfg.n, quad));
    } else {
      throw std::invalid_argument("build_problem: unknown statistic '" + sid + "'");
    }
  }
  return p;
}

// --------------------------------------------------------------------------
// Invariance suite: exact group invariance of the finite-alternative
// statistics, translation/scale invariance of the integrated ones.

inline std::vector<CheckResult> run_invariance_suite(std::uint64_t seed = kDefaultSeed,
                                                     int probes_finite = 10000,
                                                     int probes_integrated = 100) {
  std::vector<CheckResult> checks;
  auto add = [&](std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  };

  // finite groups, 1e-12, on the symmetric pairs and the bivariate quad
  struct FiniteCase {
    std::string name;
    GroupAction group;
    TestStatistic max_stat, avg_stat;
  };
  std::vector<FiniteCase> cases;
  {
    const auto p1 = make_symmetric_pair(shape_concave_sqrt(), 5);
    const std::vector<Density> a1 = {p1.p1, p1.p2};
    cases.push_back({"pair-concave-n5", group_by_id("reflect-1d", 5),
                     make_max_lr(uniform_cube_density(5), a1),
                     make_avg_lr(uniform_cube_density(5), a1)});
    const auto p2 = make_symmetric_pair(shape_convex_3x2(), 1);
    const std::vector<Density> a2 = {p2.p1, p2.p2};
    cases.push_back({"pair-convex-n1", group_by_id("reflect-1d", 1),
                     make_max_lr(uniform_cube_density(1), a2),
                     make_avg_lr(uniform_cube_density(1), a2)});
    const auto quad = quad_alternatives_9x2y2();
    cases.push_back({"quad-bivariate", group_by_id("reflect-2d-quad"),
                     make_max_lr(uniform_cube_density(2), quad.alts),
                     make_avg_lr(uniform_cube_density(2), quad.alts)});
  }

  for (const auto& c : cases) {
    const auto pts = probe_points(c.group.space(), probes_finite, seed);
    double worst = 0.0;
    std::vector<double> gx(static_cast<std::size_t>(c.group.space().n));
    for (const auto& p : pts) {
      const double m0 = c.max_stat.evaluate(p).value;
      const double a0 = c.avg_stat.evaluate(p).value;
      for (int e = 0; e < c.group.size(); ++e) {
        c.group.apply_into(e, p, gx);
        worst = std::max(worst, std::abs(c.max_stat.evaluate(gx).value - m0));
        worst = std::max(worst, std::abs(c.avg_stat.evaluate(gx).value - a0));
      }
    }
    add("finite-invariance-" + c.name, worst <= 1e-12,
        "max |delta| = " + fmt9(worst) + " over " +
            std::to_string(probes_finite) + " probes, tol=1e-12");
  }

  // integrated statistics: translation / scale invariance to 1e-8
  {
    const Density null = location_density({base_normal(), 3, 0.0});
    const rng::Stream s(seed, "invariance-integrated-loc");
    double worst = 0.0;
    std::vector<double> x(3), y(3);
    for (int i = 0; i < probes_integrated; ++i) {
      rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
      null.draw(seq, x);
      const double v0 =
          integrated_lr_location(x, base_normal(), base_cauchy()).value;
      for (double c : {-7.5, 3.25}) {
        for (int k = 0; k < 3; ++k) y[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] + c;
        const double v =
            integrated_lr_location(y, base_normal(), base_cauchy()).value;
        worst = std::max(worst, std::abs(v - v0));
      }
    }
    add("integrated-location-translation-invariance", worst <= 1e-8,
        "max |delta| = " + fmt9(worst) + " tol=1e-8");
  }
  {
    const Density null = scale_density({base_exponential(), 3, 1.0});
    const rng::Stream s(seed, "invariance-integrated-scale");
    double worst = 0.0;
    std::vector<double> x(3), y(3);
    for (int i = 0; i < probes_integrated; ++i) {
      rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
      null.draw(seq, x);
      const double v0 =
          integrated_lr_scale(x, base_exponential(), base_half_normal()).value;
      for (double c : {0.2, 5.0}) {
        for (int k = 0; k < 3; ++k) y[static_cast<std::size_t>(k)] = c * x[static_cast<std::size_t>(k)];
        const double v =
            integrated_lr_scale(y, base_exponential(), base_half_normal()).value;
        worst = std::max(worst, std::abs(v - v0));
      }
    }
    add("integrated-scale-invariance", worst <= 1e-8,
        "max |delta| = " + fmt9(worst) + " tol=1e-8");
  }

  // profiled statistics share the invariance (smaller probe set: MLE searches)
  {
    const rng::Stream s(seed, "invariance-profiled");
    double worst_loc = 0.0, worst_scale = 0.0;
    std::vector<double> x(3), y(3);
    for (int i = 0; i < probes_integrated / 2; ++i) {
      rng::Sequence seq = s.at(static_cast<std::uint64_t>(i));
      for (auto& v : x) v = seq.normal();
      const double v0 = max_lr_location(x, base_normal(), base_cauchy());
      for (int k = 0; k < 3; ++k) y[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] + 4.5;
      worst_loc = std::max(
          worst_loc, std::abs(max_lr_location(y, base_normal(), base_cauchy()) - v0));

      for (auto& v : x) v = seq.exponential();
      const double w0 = max_lr_scale(x, base_exponential(), base_half_normal());
      for (int k = 0; k < 3; ++k) y[static_cast<std::size_t>(k)] = 2.75 * x[static_cast<std::size_t>(k)];
      worst_scale = std::max(
          worst_scale,
          std::abs(max_lr_scale(y, base_exponential(), base_half_normal()) - w0));
    }
    add("profiled-location-translation-invariance", worst_loc <= 1e-8,
        "max |delta| = " + fmt9(worst_loc) + " tol=1e-8");
    add("profiled-scale-invariance", worst_scale <= 1e-8,
        "max |delta| = " + fmt9(worst_scale) + " tol=1e-8");
  }

  return checks;
}

// --------------------------------------------------------------------------
// Figure 1 style data: f, its reflection g, and both statistics on a grid
// strictly inside (0,1), plus the analytic rejection-region endpoints.

inline std::string figure1_csv(const Shape1D& shape, int grid_points = 1000) {
  const auto pair = make_symmetric_pair(shape, 1);
  const auto max = make_max_lr(uniform_cube_density(1), {pair.p1, pair.p2});
  const auto avg = make_avg_lr(uniform_cube_density(1), {pair.p1, pair.p2});
  std::string csv = "x,f,g,max_lr,avg_lr\n";
  for (int k = 1; k <= grid_points; ++k) {
    const double x = static_cast<double>(k) / (grid_points + 1);
    const double pt[1] = {x};
    csv += fmt9(x);
    csv += ',';
    csv += fmt9(shape.density(x));
    csv += ',';
    csv += fmt9(shape.density(1.0 - x));
    csv += ',';
    csv += fmt9(max.evaluate(pt).value);
    csv += ',';
    csv += fmt9(avg.evaluate(pt).value);
    csv += '\n';
  }
  return csv;
}

inline std::string figure1_regions_csv(const Shape1D& shape, double alpha) {
  const auto regions = analytic_region_n1(shape, alpha);
  std::string csv = "test,interval,lo,hi\n";
  auto emit = [&](const char* test, const Region1D& r) {
    int idx = 0;
    for (const auto& iv : r.intervals) {
      csv += test;
      csv += ',';
      csv += std::to_string(idx++);
      csv += ',';
      csv += fmt9(iv.lo);
      csv += ',';
      csv += fmt9(iv.hi);
      csv += '\n';
    }
  };
  emit("max-lr", regions.max_lr);
  emit("avg-lr", regions.avg_lr);
  return csv;
}

}  // namespace lrt
