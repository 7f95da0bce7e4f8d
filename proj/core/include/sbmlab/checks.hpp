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

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbmlab/clt.hpp"
#include "sbmlab/config.hpp"
#include "sbmlab/lattice.hpp"
#include "sbmlab/sim.hpp"

namespace sbm {

// One line of a check's CSV: test_name, params..., estimate, se,
// target_finite_N, target_limit, verdict. NaN prints as an empty cell.
struct CheckRow {
  std::string test;
  std::vector<std::string> params;
  double estimate = 0.0;
  double se = 0.0;
  double target_finite = 0.0;
  double target_limit = 0.0;
  bool passed = false;
};

struct CheckResult {
  std::string name;
  std::string anchor;
  bool passed = false;
  std::vector<std::string> param_columns;
  std::vector<CheckRow> rows;
  // Scalar outcomes echoed into summary.json, in insertion order.
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  void add(CheckRow row) {
    passed = passed && row.passed;
    rows.push_back(std::move(row));
  }
  void metric(std::string key, double value) { metrics.emplace_back(std::move(key), value); }
};

std::string format_csv(const CheckResult& result);

// Per-replica observables of the flat-start ensemble used by the moment and
// Laplace checks.
struct MomentEnsemble {
  std::string backend;
  Lattice lattice;
  // functional[r][i] = <X_{t_i}, 1_[0,1]>, i over lattice observation times.
  std::vector<std::vector<double>> functional;
  // density[r][i] = u(t_i, cell 0).
  std::vector<std::vector<double>> density;
  std::vector<double> total_mass;  // at the last observation time
  std::vector<double> clamp_fraction;

  std::size_t replicas() const noexcept { return functional.size(); }
  std::vector<double> functional_at(double t, std::size_t count) const;
  std::vector<double> density_at(double t, std::size_t count) const;
};

struct RunOptions {
  bool dump_fields = false;
  unsigned workers = 0;  // 0 = hardware concurrency
};

// Shared state of one experiment run: the config plus lazily simulated
// ensembles, so several checks reuse one set of replicas.
class RunContext {
 public:
  RunContext(ExperimentConfig config, RunOptions options = {});

  const ExperimentConfig& config() const noexcept { return config_; }
  const RunOptions& options() const noexcept { return options_; }
  std::uint64_t seed() const { return config_.seed.value(); }

  // Replicas [0, count) of the flat-start ensemble; later calls with a larger
  // count extend the cached ensemble.
  const MomentEnsemble& moments(const std::string& backend, std::size_t count);
  // Rescaled field samples V_N on the config grid, config.replicas of them.
  const std::vector<SheetSample>& sheets(double n_scale);
  const Lattice& sheet_lattice(double n_scale);

  // Period used for a window [0, extent] and horizon t_max: the configured
  // length, or 2 extent + 12 sqrt(t_max) rounded up to a multiple of dx.
  double period_for(double extent) const;

  std::string param(const std::string& check, const std::string& key) const;
  double param_number(const std::string& check, const std::string& key) const;
  std::vector<double> param_list(const std::string& check, const std::string& key) const;
  std::size_t param_count(const std::string& check, const std::string& key) const;

 private:
  DensityPath simulate(const std::string& backend, const Lattice& lattice, std::uint32_t replica,
                       const std::string& tag) const;
  void dump(const DensityPath& path, const std::string& tag) const;

  ExperimentConfig config_;
  RunOptions options_;
  std::map<std::string, std::unique_ptr<MomentEnsemble>> moments_;
  std::map<double, std::vector<SheetSample>> sheets_;
  std::map<double, std::unique_ptr<Lattice>> sheet_lattices_;
};

struct CheckParam {
  std::string key;
  std::string default_value;
};

struct CheckInfo {
  std::string name;
  std::string anchor;
  std::string summary;
  bool stochastic = false;
  std::vector<CheckParam> params;
  std::function<CheckResult(RunContext&)> run;
};

const std::vector<CheckInfo>& check_registry();
const CheckInfo* find_check(std::string_view name);
// "name → anchor  summary" per line.
std::string format_check_list();

CheckResult run_check(const CheckInfo& info, RunContext& context);

// Smooth nonnegative bumps plus a box, drawn from the function stream of
// (seed, index).
SampledFunction random_admissible(const Torus& space, std::uint64_t seed, std::uint32_t index);

}  // namespace sbm
