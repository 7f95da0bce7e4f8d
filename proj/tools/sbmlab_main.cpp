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

// sbmlab run --config PATH [--dump-fields] [--replicas R] [--seed S]
// sbmlab list-checks

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sbmlab/checks.hpp"
#include "sbmlab/config.hpp"
#include "sbmlab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sbmlab: super-Brownian motion density and Brownian-sheet CLT experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sbm::code_version());

  auto* run = app.add_subcommand("run", "run the checks of one experiment config");
  std::string config_path;
  bool dump_fields = false;
  std::uint32_t replicas = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_flag("--dump-fields", dump_fields, "write one t,x,u CSV per simulated replica");
  auto* replicas_opt = run->add_option("--replicas", replicas, "override the replica count");
  auto* seed_opt = run->add_option("--seed", seed, "override the master seed");
  run->add_option("--workers", workers, "worker threads (default: hardware concurrency)");

  app.add_subcommand("list-checks", "print every registered check with its anchor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sbm::kExitError;
  }

  if (app.got_subcommand("list-checks")) {
    std::cout << sbm::format_check_list();
    std::cout << sbm::check_registry().size() << " checks\n";
    return sbm::kExitPass;
  }

  sbm::ExperimentConfig config;
  try {
    config = sbm::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sbm::kExitError;
  }

  sbm::RunOverrides overrides;
  overrides.dump_fields = dump_fields;
  overrides.workers = workers;
  if (replicas_opt->count() > 0) overrides.replicas = replicas;
  if (seed_opt->count() > 0) overrides.seed = seed;

  const auto outcome = sbm::run_experiment(config, overrides, &std::cout);
  if (outcome.exit_code == sbm::kExitError) {
    std::cerr << "error: " << outcome.error << "\n";
  } else {
    std::cout << (outcome.exit_code == sbm::kExitPass ? "all checks passed" : "some checks failed")
              << "; artifacts in " << outcome.output_dir << "\n";
  }
  return outcome.exit_code;
}
