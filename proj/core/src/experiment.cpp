// Copyright 2026 The sbmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sbmlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace sbm {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json config_json(const ExperimentConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  j["replicas"] = cfg.replicas;
  j["backend"] = cfg.backend;
  j["output"] = cfg.output_dir();
  j["checks"] = cfg.checks;
  j["lattice"] = {{"dx", cfg.dx},
                  {"length", cfg.length ? Json(*cfg.length) : Json("auto")},
                  {"t_max", cfg.t_max}};
  j["model"] = {{"n", cfg.n_values}, {"mass_resolution", cfg.mass_resolution}};
  j["grid"] = {{"times", cfg.grid_times}, {"xs", cfg.grid_xs}};
  Json params = Json::object();
  for (const auto& [check, kv] : cfg.parameters) {
    for (const auto& [k, v] : kv) params[check][k] = v;
  }
  j["parameters"] = params;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string code_version() {
#ifdef SBMLAB_VERSION
  return SBMLAB_VERSION;
#else
  return "unknown";
#endif
}

std::string summary_json(const ExperimentConfig& cfg, const std::vector<CheckResult>& results) {
  Json j;
  j["experiment"] = cfg.name;
  j["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  j["replicas"] = cfg.replicas;
  j["code_version"] = code_version();
  bool all = true;
  Json checks = Json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    std::size_t failed = 0;
    for (const auto& row : r.rows) failed += row.passed ? 0 : 1;
    Json c;
    c["name"] = r.name;
    c["anchor"] = r.anchor;
    c["verdict"] = r.passed ? "pass" : "fail";
    c["rows"] = r.rows.size();
    c["failed_rows"] = failed;
    c["csv"] = r.name + ".csv";
    Json metrics = Json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = number_or_null(v);
    c["metrics"] = metrics;
    c["notes"] = r.notes;
    checks.push_back(std::move(c));
  }
  j["verdict"] = all ? "pass" : "fail";
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

RunOutcome run_experiment(ExperimentConfig cfg, const RunOverrides& overrides, std::ostream* log) {
  namespace fs = std::filesystem;
  using Clock = std::chrono::steady_clock;
  RunOutcome outcome;
  const auto start = Clock::now();
  const std::string started = utc_timestamp();
  Json manifest;
  Json timings = Json::object();
  try {
    if (overrides.replicas) cfg.replicas = *overrides.replicas;
    if (overrides.seed) cfg.seed = *overrides.seed;
    validate_config(cfg);
    outcome.output_dir = cfg.output_dir();
    fs::create_directories(outcome.output_dir);

    manifest["experiment"] = cfg.name;
    manifest["code_version"] = code_version();
    manifest["started_utc"] = started;
    manifest["config"] = config_json(cfg);
    manifest["config_text"] = serialize_config(cfg);
    manifest["dump_fields"] = overrides.dump_fields;

    RunOptions options;
    options.dump_fields = overrides.dump_fields;
    options.workers = overrides.workers;
    RunContext context(cfg, options);
    for (const auto& name : cfg.checks) {
      const CheckInfo* info = find_check(name);
      const auto t0 = Clock::now();
      CheckResult res = run_check(*info, context);
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      timings[name] = secs;
      write_file(fs::path(outcome.output_dir) / (name + ".csv"), format_csv(res));
      if (log) {
        *log << (res.passed ? "PASS " : "FAIL ") << name << " → " << res.anchor << "  ("
             << res.rows.size() << " rows, " << secs << " s)\n";
      }
      outcome.results.push_back(std::move(res));
    }
    write_file(fs::path(outcome.output_dir) / "summary.json", summary_json(cfg, outcome.results));
    bool all = true;
    for (const auto& r : outcome.results) all = all && r.passed;
    outcome.exit_code = all ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    outcome.error = e.what();
    outcome.exit_code = kExitError;
    if (log) *log << "error: " << e.what() << "\n";
  }
  if (!outcome.output_dir.empty()) {
    manifest["check_seconds"] = timings;
    manifest["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
    manifest["exit_code"] = outcome.exit_code;
    if (!outcome.error.empty()) manifest["error"] = outcome.error;
    try {
      write_file(fs::path(outcome.output_dir) / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
      if (log) *log << "error: " << e.what() << "\n";
      outcome.exit_code = kExitError;
    }
  }
  return outcome;
}

}  // namespace sbm
