#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrt/quadrature.hpp"

// Experiment configuration: either a named scenario from the bundled
// registry or an explicit problem description. The Monte Carlo knobs are
// optional; unset values fall back to the scenario's pinned defaults (or the
// library defaults for explicit problems). Validation collects every problem
// it finds and reports them together with their JSON paths.

namespace lrt {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems)
      : std::runtime_error(join(problems)), problems_(problems) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string s = "invalid config:";
    for (const auto& p : ps) {
      s += "\n  - ";
      s += p;
    }
    return s;
  }
  std::vector<std::string> problems_;
};

inline constexpr std::uint64_t kDefaultSeed = 20260810ull;
inline constexpr std::int64_t kDefaultNCalib = 200000;
inline constexpr std::int64_t kDefaultNPower = 1000000;

struct ExperimentConfig {
  std::string scenario;  // when set, the registry supplies the problem

  // explicit problem description (ignored when scenario is set)
  std::string problem;  // symmetric-pair | quad-bivariate | location | scale
  std::string shape_id = "convex-3x2";
  std::string f_base_id = "normal";
  std::string g_base_id = "cauchy";
  int n = 1;
  std::vector<std::string> statistic_ids;  // duels take [a, b]
  std::vector<double> weights;             // optional avg-lr weights

  // overridable knobs; scenario defaults apply when unset
  std::optional<double> alpha;
  std::optional<std::int64_t> n_calib;
  std::optional<std::int64_t> n_power;
  std::optional<std::uint64_t> seed;
  std::optional<double> quad_abs_tol;
  std::optional<double> quad_rel_tol;
  std::string out_dir = "out";
  int workers = 0;  // 0 = hardware concurrency; never affects results

  QuadratureSpec quad_spec() const {
    QuadratureSpec q;
    q.abs_tol = quad_abs_tol.value_or(1e-10);
    q.rel_tol = quad_rel_tol.value_or(1e-10);
    return q;
  }
};

namespace detail {

inline const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> ids = {
      "convex-n1",       "concave-n1",
      "symmetric-n5",    "quad-bivariate",
      "location-normal-vs-cauchy", "scale-exp-vs-halfnormal",
      "discrete-oracle"};
  return ids;
}

inline const std::vector<std::string>& known_statistics() {
  static const std::vector<std::string> ids = {"max-lr", "avg-lr", "int-loc-lr",
                                               "int-scale-lr"};
  return ids;
}

inline const std::vector<std::string>& known_problems() {
  static const std::vector<std::string> ids = {"symmetric-pair", "quad-bivariate",
                                               "location", "scale"};
  return ids;
}

inline const std::vector<std::string>& known_shapes() {
  static const std::vector<std::string> ids = {"convex-3x2", "concave-sqrt"};
  return ids;
}

inline const std::vector<std::string>& known_bases() {
  static const std::vector<std::string> ids = {"normal", "cauchy", "logistic",
                                               "exponential", "half-normal"};
  return ids;
}

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v)
    if (x == s) return true;
  return false;
}

inline std::string list(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ", ";
    s += x;
  }
  return s;
}

}  // namespace detail

inline std::string scenario_id_list() { return detail::list(detail::known_scenarios()); }

// Parses and validates; throws ConfigError listing every problem found.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  std::vector<std::string> errs;
  ExperimentConfig cfg;

  if (!j.is_object()) throw ConfigError({"config root must be a JSON object"});

  auto get_into = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    try {
      using T = std::decay_t<decltype(target)>;
      if constexpr (requires { typename T::value_type; T{}.has_value(); }) {
        typename T::value_type v;
        j.at(key).get_to(v);
        target = v;
      } else {
        j.at(key).get_to(target);
      }
    } catch (const nlohmann::json::exception&) {
      errs.push_back(std::string("/") + key + ": wrong type");
    }
  };

  get_into("scenario", cfg.scenario);
  get_into("problem", cfg.problem);
  get_into("shape", cfg.shape_id);
  get_into("f_base", cfg.f_base_id);
  get_into("g_base", cfg.g_base_id);
  get_into("n", cfg.n);
  get_into("statistics", cfg.statistic_ids);
  get_into("weights", cfg.weights);
  get_into("alpha", cfg.alpha);
  get_into("n_calib", cfg.n_calib);
  get_into("n_power", cfg.n_power);
  get_into("seed", cfg.seed);
  get_into("quad_abs_tol", cfg.quad_abs_tol);
  get_into("quad_rel_tol", cfg.quad_rel_tol);
  get_into("out", cfg.out_dir);
  get_into("workers", cfg.workers);

  static const std::vector<std::string> known = {
      "scenario", "problem",    "shape",   "f_base",       "g_base",
      "n",        "statistics", "weights", "alpha",        "n_calib",
      "n_power",  "seed",       "quad_abs_tol", "quad_rel_tol", "out",
      "workers"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!detail::contains(known, key)) errs.push_back("/" + key + ": unknown key");
  }

  if (cfg.alpha && !(*cfg.alpha > 0.0 && *cfg.alpha < 1.0))
    errs.push_back("/alpha: must be in (0,1)");
  if (cfg.n_calib && *cfg.n_calib < 1000) errs.push_back("/n_calib: must be >= 1000");
  if (cfg.n_power && *cfg.n_power < 1000) errs.push_back("/n_power: must be >= 1000");
  if (cfg.n < 1) errs.push_back("/n: must be >= 1");
  if (cfg.workers < 0) errs.push_back("/workers: must be >= 0");
  if (cfg.quad_abs_tol && !(*cfg.quad_abs_tol > 0.0))
    errs.push_back("/quad_abs_tol: must be > 0");
  if (cfg.quad_rel_tol && !(*cfg.quad_rel_tol > 0.0))
    errs.push_back("/quad_rel_tol: must be > 0");

  if (!cfg.scenario.empty()) {
    if (!detail::contains(detail::known_scenarios(), cfg.scenario))
      errs.push_back("/scenario: unknown id '" + cfg.scenario +
                     "' (valid: " + scenario_id_list() + ")");
  } else if (cfg.problem.empty()) {
    errs.push_back("either /scenario or /problem is required");
  } else if (!detail::contains(detail::known_problems(), cfg.problem)) {
    errs.push_back("/problem: unknown '" + cfg.problem +
                   "' (valid: " + detail::list(detail::known_problems()) + ")");
  } else {
    if (cfg.problem == "symmetric-pair" &&
        !detail::contains(detail::known_shapes(), cfg.shape_id))
      errs.push_back("/shape: unknown '" + cfg.shape_id +
                     "' (valid: " + detail::list(detail::known_shapes()) + ")");
    if (cfg.problem == "location" || cfg.problem == "scale") {
      const bool scale = cfg.problem == "scale";
      for (const auto& [key, id] :
           {std::pair{"f_base", cfg.f_base_id}, std::pair{"g_base", cfg.g_base_id}}) {
        if (!detail::contains(detail::known_bases(), id)) {
          errs.push_back(std::string("/") + key + ": unknown '" + id +
                         "' (valid: " + detail::list(detail::known_bases()) + ")");
          continue;
        }
        const bool positive = id == "exponential" || id == "half-normal";
        if (positive != scale)
          errs.push_back(std::string("/") + key + ": '" + id + "' is not a " +
                         (scale ? "positive-support" : "real-line") + " base");
      }
    }

    if (cfg.statistic_ids.empty()) {
      errs.push_back("/statistics: required for explicit problems");
    } else {
      const bool finite_problem =
          cfg.problem == "symmetric-pair" || cfg.problem == "quad-bivariate";
      for (const auto& s : cfg.statistic_ids) {
        if (!detail::contains(detail::known_statistics(), s)) {
          errs.push_back("/statistics: unknown '" + s + "' (valid: " +
                         detail::list(detail::known_statistics()) + ")");
          continue;
        }
        if (finite_problem && (s == "int-loc-lr" || s == "int-scale-lr"))
          errs.push_back("/statistics: '" + s + "' needs a location/scale problem");
        if (!finite_problem && s == "avg-lr")
          errs.push_back("/statistics: 'avg-lr' needs a finite alternative set");
        if (cfg.problem == "location" && s == "int-scale-lr")
          errs.push_back("/statistics: 'int-scale-lr' needs the scale problem");
        if (cfg.problem == "scale" && s == "int-loc-lr")
          errs.push_back("/statistics: 'int-loc-lr' needs the location problem");
      }
    }
    if (!cfg.weights.empty()) {
      double sum = 0.0;
      bool neg = false;
      for (double w : cfg.weights) {
        sum += w;
        neg = neg || w < 0.0;
      }
      if (neg) errs.push_back("/weights: must be nonnegative");
      if (std::abs(sum - 1.0) > 1e-12) errs.push_back("/weights: must sum to 1");
    }
  }

  if (!errs.empty()) throw ConfigError(errs);
  return cfg;
}

// The effective config as canonical JSON (sorted keys) for hashing and
// manifest embedding. Unset knobs appear with the values actually used.
inline nlohmann::json effective_config_json(const ExperimentConfig& cfg,
                                            double alpha, std::int64_t n_calib,
                                            std::int64_t n_power,
                                            std::uint64_t seed) {
  nlohmann::json j;
  if (!cfg.scenario.empty()) {
    j["scenario"] = cfg.scenario;
  } else {
    j["problem"] = cfg.problem;
    if (cfg.problem == "symmetric-pair" || cfg.problem == "quad-bivariate")
      j["shape"] = cfg.shape_id;
    if (cfg.problem == "location" || cfg.problem == "scale") {
      j["f_base"] = cfg.f_base_id;
      j["g_base"] = cfg.g_base_id;
    }
    j["n"] = cfg.n;
    j["statistics"] = cfg.statistic_ids;
    if (!cfg.weights.empty()) j["weights"] = cfg.weights;
  }
  j["alpha"] = alpha;
  j["n_calib"] = n_calib;
  j["n_power"] = n_power;
  j["seed"] = seed;
  j["quad_abs_tol"] = cfg.quad_abs_tol.value_or(1e-10);
  j["quad_rel_tol"] = cfg.quad_rel_tol.value_or(1e-10);
  return j;
}

}  // namespace lrt
