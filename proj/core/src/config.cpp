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

#include "sbmlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sbmlab/checks.hpp"

namespace sbm {

namespace {

std::string anchored(const std::string& source, int line, const std::string& message) {
  std::ostringstream out;
  out << source;
  if (line > 0) out << ":" << line;
  out << ": " << message;
  return out.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
    if (!piece.empty()) items.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

double parse_number(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw InvalidArgument("expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw InvalidArgument("expected a nonnegative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_number(values[i]);
  }
  return out;
}

const std::set<std::string>& known_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"name", "seed", "replicas", "backend", "output", "checks"}},
      {"lattice", {"dx", "length", "t_max"}},
      {"model", {"n", "mass_resolution"}},
      {"grid", {"times", "xs", "intervals"}},
  };
  static const std::set<std::string> none;
  const auto it = keys.find(section);
  return it == keys.end() ? none : it->second;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : InvalidArgument(anchored(source, line, message)), line_(line) {}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number(item));
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.n_values.clear();
  bool have_n = false;
  bool have_intervals = false, have_times = false, have_xs = false;
  std::map<std::string, int> section_lines;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(source, line_no, "empty section name");
      const bool builtin = !known_keys(section).empty();
      if (!builtin && find_check(section) == nullptr) {
        throw ConfigError(source, line_no, "unknown section [" + section + "]");
      }
      if (section_lines.count(section)) {
        throw ConfigError(source, line_no, "duplicate section [" + section + "]");
      }
      section_lines[section] = line_no;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(source, line_no, "missing key before '='");
    if (section.empty()) throw ConfigError(source, line_no, "key '" + key + "' outside any section");
    if (!seen.insert({section, key}).second) {
      throw ConfigError(source, line_no, "duplicate key '" + key + "' in [" + section + "]");
    }

    try {
      if (const auto& keys = known_keys(section); !keys.empty()) {
        if (!keys.count(key)) {
          throw InvalidArgument("unknown key '" + key + "' in [" + section + "]");
        }
        if (section == "experiment") {
          if (key == "name") {
            cfg.name = value;
          } else if (key == "seed") {
            cfg.seed = parse_unsigned(value);
          } else if (key == "replicas") {
            const auto r = parse_unsigned(value);
            if (r > 100'000'000) throw InvalidArgument("replicas out of range");
            cfg.replicas = static_cast<std::uint32_t>(r);
          } else if (key == "backend") {
            cfg.backend = value;
          } else if (key == "output") {
            cfg.output = value;
          } else if (key == "checks") {
            cfg.checks = split_list(value);
          }
        } else if (section == "lattice") {
          if (key == "dx") {
            cfg.dx = parse_number(value);
          } else if (key == "length") {
            if (value == "auto") {
              cfg.length.reset();
            } else {
              cfg.length = parse_number(value);
            }
          } else if (key == "t_max") {
            cfg.t_max = parse_number(value);
          }
        } else if (section == "model") {
          if (key == "n") {
            cfg.n_values = parse_number_list(value);
            have_n = true;
          } else if (key == "mass_resolution") {
            cfg.mass_resolution = parse_number(value);
          }
        } else if (section == "grid") {
          if (key == "times") {
            cfg.grid_times = parse_number_list(value);
            have_times = true;
          } else if (key == "xs") {
            cfg.grid_xs = parse_number_list(value);
            have_xs = true;
          } else if (key == "intervals") {
            const auto g = SheetGrid::uniform(parse_unsigned(value));
            have_intervals = true;
            if (!have_times) cfg.grid_times = g.times;
            if (!have_xs) cfg.grid_xs = g.xs;
          }
        }
      } else {
        const CheckInfo* info = find_check(section);
        const bool known = std::any_of(info->params.begin(), info->params.end(),
                                       [&](const CheckParam& p) { return p.key == key; });
        if (!known) {
          throw InvalidArgument("check " + section + " has no parameter '" + key + "'");
        }
        cfg.parameters[section][key] = value;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError(source, line_no, e.what());
    }
  }
  if (have_intervals && (have_times || have_xs)) {
    throw ConfigError(source, section_lines["grid"], "grid: give either intervals or times/xs");
  }
  if (!have_n) cfg.n_values = {64.0};

  for (const auto& [check, params] : cfg.parameters) {
    if (std::find(cfg.checks.begin(), cfg.checks.end(), check) == cfg.checks.end()) {
      throw ConfigError(source, section_lines[check],
                        "parameters given for [" + check + "], which is not in checks");
    }
  }
  validate_config(cfg, source);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg, const std::string& source) {
  auto fail = [&](const std::string& m) { throw ConfigError(source, 0, m); };
  if (!cfg.seed) fail("seed required");
  if (cfg.name.empty()) fail("experiment name required");
  if (cfg.checks.empty()) fail("at least one check required");
  std::set<std::string> unique;
  bool stochastic = false;
  for (const auto& c : cfg.checks) {
    const CheckInfo* info = find_check(c);
    if (info == nullptr) fail("unknown check '" + c + "'");
    if (!unique.insert(c).second) fail("check '" + c + "' listed twice");
    stochastic = stochastic || info->stochastic;
  }
  if (stochastic && cfg.replicas == 0) fail("stochastic checks need replicas >= 1");
  if (cfg.backend != "fd" && cfg.backend != "particles" && cfg.backend != "both") {
    fail("backend must be fd, particles or both");
  }
  if (!(cfg.dx > 0.0)) fail("lattice dx must be positive");
  if (cfg.length && !(*cfg.length > 0.0)) fail("lattice length must be positive");
  if (!(cfg.t_max > 0.0)) fail("lattice t_max must be positive");
  if (cfg.n_values.empty()) fail("model n needs at least one scale");
  for (double n : cfg.n_values) {
    if (!(n > 0.0)) fail("model n values must be positive");
  }
  if (!(cfg.mass_resolution >= 1.0)) fail("mass_resolution must be >= 1");
  if (cfg.grid_times.empty() != cfg.grid_xs.empty()) fail("grid needs both times and xs");
  if (!cfg.grid_times.empty()) {
    try {
      SheetGrid{cfg.grid_times, cfg.grid_xs}.validate();
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
    if (cfg.grid_times.back() > cfg.t_max * (1.0 + 1e-12)) fail("grid times exceed t_max");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "name = " << cfg.name << "\n";
  if (cfg.seed) out << "seed = " << *cfg.seed << "\n";
  out << "replicas = " << cfg.replicas << "\n";
  out << "backend = " << cfg.backend << "\n";
  if (!cfg.output.empty()) out << "output = " << cfg.output << "\n";
  out << "checks = ";
  for (std::size_t i = 0; i < cfg.checks.size(); ++i) out << (i ? ", " : "") << cfg.checks[i];
  out << "\n\n[lattice]\n";
  out << "dx = " << format_number(cfg.dx) << "\n";
  out << "length = " << (cfg.length ? format_number(*cfg.length) : std::string("auto")) << "\n";
  out << "t_max = " << format_number(cfg.t_max) << "\n";
  out << "\n[model]\n";
  out << "n = " << join_numbers(cfg.n_values) << "\n";
  out << "mass_resolution = " << format_number(cfg.mass_resolution) << "\n";
  if (!cfg.grid_times.empty()) {
    out << "\n[grid]\n";
    out << "times = " << join_numbers(cfg.grid_times) << "\n";
    out << "xs = " << join_numbers(cfg.grid_xs) << "\n";
  }
  for (const auto& [check, params] : cfg.parameters) {
    out << "\n[" << check << "]\n";
    for (const auto& [k, v] : params) out << k << " = " << v << "\n";
  }
  return out.str();
}

}  // namespace sbm
