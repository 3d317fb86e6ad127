// lrt: likelihood-ratio test construction and Monte Carlo power analysis.
//
// Subcommands:
//   calibrate   Monte Carlo critical values for the configured statistics
//   duel        paired power comparison of two tests (common random numbers)
//   reproduce   run a canned scenario and check it against its thresholds
//   figure1     grid data for the two-shapes picture plus region endpoints
//
// Exit codes: 0 = success / all checks pass, 1 = a check failed,
// 2 = configuration error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lrt/config.hpp"
#include "lrt/scenarios.hpp"

namespace {

using lrt::ojson;

struct CommonFlags {
  std::string config_path;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::int64_t> n_calib;
  std::optional<std::int64_t> n_power;
  std::string out_dir;
  int workers = 0;
};

void attach_common(CLI::App* cmd, CommonFlags& f, bool with_scenario = true) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  if (with_scenario)
    cmd->add_option("--scenario", f.scenario,
                    "scenario id (" + lrt::scenario_id_list() + ")");
  cmd->add_option("--seed", f.seed, "master seed (u64)");
  cmd->add_option("--alpha", f.alpha, "test level in (0,1)");
  cmd->add_option("--n-calib", f.n_calib, "calibration replicates");
  cmd->add_option("--n-power", f.n_power, "power replicates");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--workers", f.workers,
                  "worker threads (0 = hardware); never affects results");
}

// Merge config file and command-line flags (flags win).
lrt::ExperimentConfig load_config(const CommonFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw lrt::ConfigError({"cannot open config file: " + f.config_path});
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw lrt::ConfigError({"config is not valid JSON: " + std::string(e.what())});
    }
  }
  if (!f.scenario.empty()) j["scenario"] = f.scenario;
  if (f.seed) j["seed"] = *f.seed;
  if (f.alpha) j["alpha"] = *f.alpha;
  if (f.n_calib) j["n_calib"] = *f.n_calib;
  if (f.n_power) j["n_power"] = *f.n_power;
  if (!f.out_dir.empty()) j["out"] = f.out_dir;
  if (f.workers > 0) j["workers"] = f.workers;
  return lrt::parse_config(j);
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& contents) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("failed to write " + (dir / name).string());
}

lrt::ScenarioOverrides overrides_from(const lrt::ExperimentConfig& cfg) {
  lrt::ScenarioOverrides ov;
  ov.alpha = cfg.alpha;
  ov.n_calib = cfg.n_calib;
  ov.n_power = cfg.n_power;
  ov.seed = cfg.seed;
  ov.workers = cfg.workers;
  ov.quad = cfg.quad_spec();
  return ov;
}

int cmd_reproduce(const CommonFlags& flags) {
  const lrt::ExperimentConfig cfg = load_config(flags);
  if (cfg.scenario.empty())
    throw lrt::ConfigError({"reproduce needs --scenario (valid: " +
                            lrt::scenario_id_list() + ")"});

  const auto t0 = std::chrono::steady_clock::now();
  const lrt::ScenarioResult r = lrt::run_scenario(cfg.scenario, overrides_from(cfg));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::filesystem::path dir =
      std::filesystem::path(cfg.out_dir) / cfg.scenario;
  for (const auto& [name, contents] : r.files) write_file(dir, name, contents);
  const auto eff = lrt::effective_config_json(cfg, r.alpha, r.n_calib, r.n_power, r.seed);
  write_file(dir, "manifest.json",
             lrt::manifest_json(eff, r.seed, r.substreams, secs).dump(2) + "\n");

  for (const auto& c : r.checks)
    std::printf("[%s] %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.empty() ? "" : ": ", c.detail.c_str());
  std::printf("%s: %zu checks, %s (%.1fs), results in %s\n", cfg.scenario.c_str(),
              r.checks.size(), r.all_pass() ? "all pass" : "FAILURES", secs,
              dir.string().c_str());
  return r.all_pass() ? 0 : 1;
}

int cmd_duel(const CommonFlags& flags) {
  const lrt::ExperimentConfig cfg = load_config(flags);
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir(cfg.out_dir);

  if (!cfg.scenario.empty()) {
    if (cfg.scenario == "discrete-oracle")
      throw lrt::ConfigError({"scenario discrete-oracle has no Monte Carlo duel; "
                              "use `lrt reproduce`"});
    const lrt::ScenarioResult r = lrt::run_scenario(cfg.scenario, overrides_from(cfg));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(dir, "duel.json", r.files.at("duel.json"));
    write_file(dir, "duel.csv", r.files.at("duel.csv"));
    const auto eff =
        lrt::effective_config_json(cfg, r.alpha, r.n_calib, r.n_power, r.seed);
    write_file(dir, "manifest.json",
               lrt::manifest_json(eff, r.seed, r.substreams, secs).dump(2) + "\n");
    std::printf("duel written to %s\n", dir.string().c_str());
    return 0;
  }

  if (cfg.statistic_ids.size() != 2)
    throw lrt::ConfigError({"/statistics: duel needs exactly two statistics [a, b]"});
  const lrt::ProblemSetup p = lrt::build_problem(cfg);
  const double alpha = cfg.alpha.value_or(0.1);
  const std::int64_t n_calib = cfg.n_calib.value_or(lrt::kDefaultNCalib);
  const std::int64_t n_power = cfg.n_power.value_or(lrt::kDefaultNPower);
  const std::uint64_t seed = cfg.seed.value_or(lrt::kDefaultSeed);
  const int workers = lrt::scenario_detail::effective_workers(cfg.workers);

  lrt::rng::Stream master(seed, "explicit-duel");
  const lrt::DuelReport d = lrt::duel(p.stats[0], p.stats[1], p.null, p.alts, alpha,
                                      n_calib, n_power, master, workers);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ojson bundle;
  bundle["scenario"] = "";
  bundle["alpha"] = alpha;
  bundle["n_calib"] = n_calib;
  bundle["n_power"] = n_power;
  bundle["seed"] = seed;
  ojson dj = lrt::duel_report_json(d);
  dj["problem"] = p.meta;
  bundle["duels"] = ojson::array({dj});
  write_file(dir, "duel.json", bundle.dump(2) + "\n");
  write_file(dir, "duel.csv", lrt::duel_csv(d));

  std::vector<std::pair<std::string, std::uint64_t>> subs = {
      {"calibrate", master.substream("calibrate").key()},
      {"size", master.substream("size").key()}};
  for (std::uint64_t j = 0; j < p.alts.size(); ++j)
    subs.emplace_back("power:" + std::to_string(j), master.substream("power", j).key());
  const auto eff = lrt::effective_config_json(cfg, alpha, n_calib, n_power, seed);
  write_file(dir, "manifest.json",
             lrt::manifest_json(eff, seed, subs, secs).dump(2) + "\n");
  std::printf("duel written to %s\n", dir.string().c_str());
  return 0;
}

int cmd_calibrate(const CommonFlags& flags) {
  const lrt::ExperimentConfig cfg = load_config(flags);
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir(cfg.out_dir);

  ojson out;
  std::vector<std::pair<std::string, std::uint64_t>> subs;
  double alpha;
  std::int64_t n_calib;
  std::uint64_t seed;

  if (!cfg.scenario.empty()) {
    if (cfg.scenario == "discrete-oracle")
      throw lrt::ConfigError({"scenario discrete-oracle has nothing to calibrate; "
                              "use `lrt reproduce`"});
    lrt::ScenarioOverrides ov = overrides_from(cfg);
    // calibration only: skip the power passes by running the scenario's
    // calibration streams directly on its first duel problem
    const lrt::ScenarioResult r = lrt::run_scenario(cfg.scenario, [&] {
      lrt::ScenarioOverrides small = ov;
      small.n_power = 1000;  // minimum; power output is discarded
      return small;
    }());
    alpha = r.alpha;
    n_calib = r.n_calib;
    seed = r.seed;
    out["scenario"] = cfg.scenario;
    out["alpha"] = alpha;
    out["n_calib"] = n_calib;
    out["seed"] = seed;
    out["tests"] = ojson::array();
    for (const auto& d : r.duels) {
      out["tests"].push_back(lrt::calibrated_test_json(d.test_a, "a"));
      out["tests"].push_back(lrt::calibrated_test_json(d.test_b, "b"));
    }
    // n = 1 scenarios also report the rejection region in x-space
    if (cfg.scenario == "convex-n1" || cfg.scenario == "concave-n1") {
      const auto& d = r.duels[0];
      out["regions"] = ojson::object();
      out["regions"]["avg-lr"] = lrt::region_json(lrt::calibrated_region_n1(d.test_a));
      out["regions"]["max-lr"] = lrt::region_json(lrt::calibrated_region_n1(d.test_b));
    }
    subs = r.substreams;
  } else {
    if (cfg.statistic_ids.empty())
      throw lrt::ConfigError({"/statistics: calibrate needs at least one statistic"});
    const lrt::ProblemSetup p = lrt::build_problem(cfg);
    alpha = cfg.alpha.value_or(0.1);
    n_calib = cfg.n_calib.value_or(lrt::kDefaultNCalib);
    seed = cfg.seed.value_or(lrt::kDefaultSeed);
    const int workers = lrt::scenario_detail::effective_workers(cfg.workers);
    lrt::rng::Stream master(seed, "explicit-calibrate");
    const lrt::rng::Stream cal = master.substream("calibrate");
    subs.emplace_back("calibrate", cal.key());
    out["alpha"] = alpha;
    out["n_calib"] = n_calib;
    out["seed"] = seed;
    out["problem"] = p.meta;
    out["tests"] = ojson::array();
    for (std::size_t i = 0; i < p.stats.size(); ++i) {
      const auto t = lrt::calibrate(p.stats[i], p.null, alpha, n_calib, cal, workers);
      out["tests"].push_back(
          lrt::calibrated_test_json(t, std::string(1, static_cast<char>('a' + i))));
    }
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(dir, "calibration.json", out.dump(2) + "\n");
  const auto eff = lrt::effective_config_json(cfg, alpha, n_calib,
                                              cfg.n_power.value_or(0), seed);
  write_file(dir, "manifest.json",
             lrt::manifest_json(eff, seed, subs, secs).dump(2) + "\n");
  std::printf("calibration written to %s\n", dir.string().c_str());
  return 0;
}

int cmd_figure1(const CommonFlags& flags, const std::string& shape_id) {
  nlohmann::json j = nlohmann::json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in)
      throw lrt::ConfigError({"cannot open config file: " + flags.config_path});
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw lrt::ConfigError({"config is not valid JSON: " + std::string(e.what())});
    }
  }
  // figure1 is always about a symmetric pair; fill the problem so the shared
  // validation applies to alpha and friends
  if (!j.contains("scenario") && !j.contains("problem")) {
    j["problem"] = "symmetric-pair";
    j["statistics"] = {"avg-lr", "max-lr"};
  }
  if (flags.alpha) j["alpha"] = *flags.alpha;
  if (!flags.out_dir.empty()) j["out"] = flags.out_dir;
  const lrt::ExperimentConfig cfg = lrt::parse_config(j);
  const double alpha = cfg.alpha.value_or(0.1);
  const lrt::Shape1D shape = lrt::shape_by_id(
      !shape_id.empty() ? shape_id
                        : (cfg.shape_id.empty() ? "convex-3x2" : cfg.shape_id));
  if (shape.curvature == lrt::Curvature::neither)
    throw lrt::ConfigError({"figure1 needs a convex or concave shape"});

  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir(cfg.out_dir);
  write_file(dir, "figure1.csv", lrt::figure1_csv(shape));
  write_file(dir, "figure1_regions.csv", lrt::figure1_regions_csv(shape, alpha));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json eff;
  eff["figure1"] = shape.id;
  eff["alpha"] = alpha;
  write_file(dir, "manifest.json",
             lrt::manifest_json(eff, cfg.seed.value_or(lrt::kDefaultSeed), {}, secs)
                     .dump(2) + "\n");
  std::printf("figure data written to %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"likelihood-ratio test lab: max vs average/integrated LR"};
  app.require_subcommand(1);

  CommonFlags calibrate_flags, duel_flags, reproduce_flags, figure_flags;
  std::string figure_shape;

  CLI::App* calibrate = app.add_subcommand("calibrate", "Monte Carlo critical values");
  attach_common(calibrate, calibrate_flags);
  CLI::App* duel = app.add_subcommand("duel", "paired power comparison");
  attach_common(duel, duel_flags);
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "run a canned scenario against its thresholds");
  attach_common(reproduce, reproduce_flags);
  CLI::App* figure1 = app.add_subcommand("figure1", "grid data for the f/g picture");
  attach_common(figure1, figure_flags, false);
  figure1->add_option("--shape", figure_shape, "shape id (convex-3x2, concave-sqrt)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a config error
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(calibrate_flags);
    if (duel->parsed()) return cmd_duel(duel_flags);
    if (reproduce->parsed()) return cmd_reproduce(reproduce_flags);
    if (figure1->parsed()) return cmd_figure1(figure_flags, figure_shape);
  } catch (const lrt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
