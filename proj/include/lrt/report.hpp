#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrt/power.hpp"
#include "lrt/version.hpp"

// Result serialization. Schemas are fixed: JSON objects use ordered_json
// with a pinned key order, CSV tables use a pinned column order and
// locale-independent 9-significant-digit formatting. Everything except the
// manifest's "timestamp" field is a pure function of (config, seed), which
// is what makes byte-for-byte reproducibility checks possible.

namespace lrt {

using ojson = nlohmann::ordered_json;

// %.9g equivalent via to_chars: locale-independent, 9 significant digits.
inline std::string fmt9(double v) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

inline std::string hex_key(std::uint64_t k) {
  char buf[19];
  const auto res = std::to_chars(buf, buf + sizeof(buf), k, 16);
  std::string s(buf, res.ptr);
  return "0x" + std::string(16 - s.size(), '0') + s;
}

// FNV-1a over a string; used to fingerprint configs in manifests.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return hex_key(h);
}

inline ojson power_estimate_json(const PowerEstimate& e) {
  ojson j;
  j["p_hat"] = e.p_hat;
  j["std_error"] = e.std_error;
  j["n"] = e.n;
  j["failures"] = e.failures;
  j["stream_key"] = hex_key(e.stream_key);
  return j;
}

inline ojson calibrated_test_json(const CalibratedTest& t, std::string_view role) {
  ojson j;
  j["role"] = std::string(role);
  j["id"] = t.statistic.id();
  j["alpha"] = t.alpha;
  j["critical_value"] = t.critical_value;
  j["attained_size"] = t.calibration.attained_size;
  j["n_calib"] = t.calibration.replicates;
  j["calibration_failures"] = t.calibration.failures;
  j["calibration_stream_key"] = hex_key(t.calibration.stream_key);
  return j;
}

inline ojson duel_report_json(const DuelReport& r) {
  ojson j;
  j["alpha"] = r.alpha;
  j["n_calib"] = r.n_calib;
  j["n_power"] = r.n_power;
  j["tests"] = ojson::array();
  j["tests"].push_back(calibrated_test_json(r.test_a, "a"));
  j["tests"].push_back(calibrated_test_json(r.test_b, "b"));
  j["fresh_size"] = ojson::object();
  j["fresh_size"]["a"] = power_estimate_json(r.size_a);
  j["fresh_size"]["b"] = power_estimate_json(r.size_b);
  j["alternatives"] = ojson::array();
  for (const auto& cmp : r.alternatives) {
    ojson a;
    a["id"] = cmp.alternative_id;
    a["power_a"] = power_estimate_json(cmp.power_a);
    a["power_b"] = power_estimate_json(cmp.power_b);
    ojson paired;
    paired["diff"] = cmp.diff;
    paired["std_error"] = cmp.paired_se;
    paired["n10"] = cmp.n10;
    paired["n01"] = cmp.n01;
    a["paired"] = paired;
    a["verdict"] = verdict_name(cmp.verdict);
    j["alternatives"].push_back(a);
  }
  return j;
}

inline const char* kDuelCsvHeader =
    "test,alternative,alpha,critical_value,p_hat,std_error,N,seed\n";

// One row per test x alternative.
inline void append_duel_csv_rows(std::string& csv, const DuelReport& r) {
  auto row = [&](const CalibratedTest& t, const PairedComparison& cmp,
                 const PowerEstimate& e) {
    csv += t.statistic.id();
    csv += ',';
    csv += cmp.alternative_id;
    csv += ',';
    csv += fmt9(r.alpha);
    csv += ',';
    csv += fmt9(t.critical_value);
    csv += ',';
    csv += fmt9(e.p_hat);
    csv += ',';
    csv += fmt9(e.std_error);
    csv += ',';
    csv += std::to_string(e.n);
    csv += ',';
    csv += std::to_string(e.stream_key);
    csv += '\n';
  };
  for (const auto& cmp : r.alternatives) {
    row(r.test_a, cmp, cmp.power_a);
    row(r.test_b, cmp, cmp.power_b);
  }
}

inline std::string duel_csv(const DuelReport& r) {
  std::string csv = kDuelCsvHeader;
  append_duel_csv_rows(csv, r);
  return csv;
}

inline ojson region_json(const Region1D& r) {
  ojson intervals = ojson::array();
  for (const auto& iv : r.intervals) {
    ojson o;
    o["lo"] = iv.lo;
    o["hi"] = iv.hi;
    intervals.push_back(o);
  }
  ojson j;
  j["intervals"] = intervals;
  j["measure"] = r.measure();
  return j;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline ojson checks_json(const std::vector<CheckResult>& checks) {
  ojson arr = ojson::array();
  for (const auto& c : checks) {
    ojson j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["detail"] = c.detail;
    arr.push_back(j);
  }
  return arr;
}

inline std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

// Everything except "timestamp" reproduces byte-for-byte on rerun.
inline ojson manifest_json(const ojson& effective_config, std::uint64_t master_seed,
                           const std::vector<std::pair<std::string, std::uint64_t>>& substreams,
                           double duration_seconds) {
  ojson j;
  j["artifact_version"] = kVersion;
  j["config_hash"] = fnv1a_hex(effective_config.dump());
  j["master_seed"] = master_seed;
  ojson subs;
  for (const auto& [name, key] : substreams) subs[name] = hex_key(key);
  j["substreams"] = subs;
  ojson ts;
  ts["started_utc"] = iso8601_utc_now();
  ts["duration_seconds"] = duration_seconds;
  j["timestamp"] = ts;
  return j;
}

}  // namespace lrt
