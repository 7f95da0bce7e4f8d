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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sbmlab/checks.hpp"
#include "sbmlab/config.hpp"

namespace sbm {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

struct RunOverrides {
  std::optional<std::uint32_t> replicas;
  std::optional<std::uint64_t> seed;
  bool dump_fields = false;
  unsigned workers = 0;
};

struct RunOutcome {
  int exit_code = kExitError;
  std::string output_dir;
  std::vector<CheckResult> results;
  std::string error;
};

std::string code_version();

// Runs every configured check in order and writes into config.output_dir():
//   manifest.json   config echo, code version, wall times
//   <check>.csv     one per check
//   summary.json    per-check verdicts; no timing, byte-stable per seed
// Exit 0 when all checks pass, 2 when any fails, 1 on an execution error.
RunOutcome run_experiment(ExperimentConfig config, const RunOverrides& overrides = {},
                          std::ostream* log = nullptr);

std::string summary_json(const ExperimentConfig& config, const std::vector<CheckResult>& results);

}  // namespace sbm
