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

#include <gtest/gtest.h>

#include <string>

#include "sbmlab/config.hpp"

namespace {

const char* kFull = R"(# sheet run
[experiment]
name = sheet
seed = 20261014
replicas = 300
backend = both
output = out/sheet_test
checks = covariance_sheet, holder_increments, moment_first

[lattice]
dx = 0.025
length = 200
t_max = 1

[model]
n = 16, 64
mass_resolution = 150

[grid]
times = 0, 0.5, 1
xs = 0, 0.25, 1

[covariance_sheet]
limit_tolerance = 0.1

[holder_increments]
orders = 2
margin = 0.25
)";

std::string error_of(const std::string& text) {
  try {
    sbm::parse_config(text, "t.cfg");
  } catch (const sbm::ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, ParsesEveryField) {
  const auto c = sbm::parse_config(kFull, "t.cfg");
  EXPECT_EQ(c.name, "sheet");
  EXPECT_EQ(c.seed, 20261014u);
  EXPECT_EQ(c.replicas, 300u);
  EXPECT_EQ(c.backend, "both");
  EXPECT_EQ(c.output_dir(), "out/sheet_test");
  EXPECT_EQ(c.checks.size(), 3u);
  EXPECT_EQ(c.dx, 0.025);
  ASSERT_TRUE(c.length.has_value());
  EXPECT_EQ(*c.length, 200.0);
  EXPECT_EQ(c.n_values, (std::vector<double>{16.0, 64.0}));
  EXPECT_EQ(c.mass_resolution, 150.0);
  EXPECT_EQ(c.grid_xs, (std::vector<double>{0.0, 0.25, 1.0}));
  EXPECT_EQ(c.parameters.at("holder_increments").at("margin"), "0.25");
}

TEST(Config, RoundTripsThroughSerialize) {
  const auto c = sbm::parse_config(kFull, "t.cfg");
  const std::string text = sbm::serialize_config(c);
  const auto again = sbm::parse_config(text, "round.cfg");
  EXPECT_EQ(again, c);
  EXPECT_EQ(sbm::serialize_config(again), text);

  const auto minimal = sbm::parse_config("[experiment]\nname = m\nseed = 1\nchecks = plancherel_lemma\n[grid]\nintervals = 4\n");
  EXPECT_FALSE(minimal.length.has_value());
  EXPECT_EQ(minimal.grid_times.size(), 5u);
  EXPECT_EQ(sbm::parse_config(sbm::serialize_config(minimal)), minimal);
}

TEST(Config, DefaultOutputFollowsName) {
  const auto c = sbm::parse_config("[experiment]\nname = abc\nseed = 3\nchecks = reproducibility\n");
  EXPECT_EQ(c.output_dir(), "out/abc");
  EXPECT_EQ(c.n_values, (std::vector<double>{64.0}));
}

TEST(Config, SeedRequired) {
  const std::string e = error_of("[experiment]\nname = a\nchecks = plancherel_lemma\n");
  EXPECT_NE(e.find("seed required"), std::string::npos) << e;
}

TEST(Config, ErrorsCarryLineNumbers) {
  struct Case {
    std::string text;
    std::string where;
    std::string what;
  };
  const std::vector<Case> cases{
      {"[experiment]\nname = a\nseed = x\n", "t.cfg:3:", "nonnegative integer"},
      {"[experiment]\nname = a\n[bogus]\n", "t.cfg:3:", "unknown section"},
      {"[experiment]\nname = a\ncolour = red\n", "t.cfg:3:", "unknown key"},
      {"[experiment]\nname = a\nname = b\n", "t.cfg:3:", "duplicate key"},
      {"[experiment]\n[experiment]\n", "t.cfg:2:", "duplicate section"},
      {"name = a\n", "t.cfg:1:", "outside any section"},
      {"[experiment]\njust words\n", "t.cfg:2:", "key = value"},
      {"[experiment\n", "t.cfg:1:", "unterminated"},
      {"[experiment]\nname = a\nseed = 1\nchecks = plancherel_lemma\n\n[lattice]\ndx = fast\n",
       "t.cfg:7:", "expected a number"},
      {"[experiment]\nname = a\nseed = 1\nchecks = plancherel_lemma\n[heat_semigroup]\ns = 1\n",
       "t.cfg:5:", "not in checks"},
      {"[experiment]\nname = a\nseed = 1\nchecks = plancherel_lemma\n[plancherel_lemma]\nwidth = 1\n",
       "t.cfg:6:", "no parameter"},
  };
  for (const auto& c : cases) {
    const std::string e = error_of(c.text);
    EXPECT_EQ(e.rfind(c.where, 0), 0u) << e;
    EXPECT_NE(e.find(c.what), std::string::npos) << e;
  }
}

TEST(Config, SemanticValidation) {
  EXPECT_NE(error_of("[experiment]\nname = a\nseed = 1\nchecks = nope\n").find("unknown check"),
            std::string::npos);
  EXPECT_NE(error_of("[experiment]\nname = a\nseed = 1\nchecks = covariance_sheet\n").find("replicas"),
            std::string::npos);
  EXPECT_NE(error_of("[experiment]\nname = a\nseed = 1\nbackend = gpu\nchecks = reproducibility\n")
                .find("backend"),
            std::string::npos);
  EXPECT_NE(error_of("[experiment]\nname = a\nseed = 1\nchecks = reproducibility, reproducibility\n")
                .find("twice"),
            std::string::npos);
  EXPECT_NE(error_of("[experiment]\nname = a\nseed = 1\nchecks = reproducibility\n[grid]\ntimes = 0, 2\nxs = 0, 1\n")
                .find("t_max"),
            std::string::npos);
}

TEST(Config, NumberFormatting) {
  EXPECT_EQ(sbm::format_number(0.1), "0.1");
  EXPECT_EQ(sbm::format_number(1e-4), "1e-04");
  EXPECT_EQ(sbm::parse_number_list(sbm::format_number(1.0 / 3.0)).front(), 1.0 / 3.0);
  EXPECT_EQ(sbm::format_number(20261014), "20261014");
  EXPECT_EQ(sbm::parse_number_list(" 1, 2.5 ,1e3"), (std::vector<double>{1.0, 2.5, 1000.0}));
}

}  // namespace
