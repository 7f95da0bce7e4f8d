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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbmlab/error.hpp"

namespace sbm {

// Config problems; what() is "source:line: message" when a line is known.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Experiment description. The text form is an INI-style file:
//
//   [experiment]  name, seed, replicas, backend, output, checks
//   [lattice]     dx, length (number or "auto"), t_max
//   [model]       n (list of scales), mass_resolution
//   [grid]        times, xs (lists) or intervals (uniform {0, 1/n, ..., 1})
//   [<check>]     parameters of one registered check
struct ExperimentConfig {
  std::string name;
  std::optional<std::uint64_t> seed;
  std::uint32_t replicas = 0;
  std::string backend = "fd";  // fd | particles | both
  std::string output;          // default "out/<name>"
  std::vector<std::string> checks;

  double dx = 0.05;
  std::optional<double> length;  // empty = auto
  double t_max = 1.0;

  std::vector<double> n_values{64.0};
  double mass_resolution = 200.0;

  std::vector<double> grid_times;
  std::vector<double> grid_xs;

  std::map<std::string, std::map<std::string, std::string>> parameters;

  bool operator==(const ExperimentConfig&) const = default;

  std::string output_dir() const { return output.empty() ? "out/" + name : output; }
};

ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Semantic checks shared by the parser and programmatic configs.
void validate_config(const ExperimentConfig& config, const std::string& source = "<config>");

// Shortest text that parses back to exactly v.
std::string format_number(double v);
std::vector<double> parse_number_list(std::string_view text);

}  // namespace sbm
