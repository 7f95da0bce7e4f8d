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

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "sbmlab/checks.hpp"
#include "sbmlab/config.hpp"
#include "sbmlab/experiment.hpp"

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

sbm::RunOverrides overrides(unsigned workers, std::optional<std::uint64_t> seed = {},
                            bool dump = false) {
  sbm::RunOverrides o;
  o.workers = workers;
  o.seed = seed;
  o.dump_fields = dump;
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sbmlab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

sbm::ExperimentConfig small_stochastic(const fs::path& out) {
  return sbm::parse_config("[experiment]\nname = small\nseed = 4242\nreplicas = 40\nbackend = both\n"
                           "output = " + out.string() +
                           "\nchecks = moment_first, covariance_sheet, reproducibility\n"
                           "[lattice]\ndx = 0.1\n[model]\nn = 8\nmass_resolution = 20\n"
                           "[grid]\nintervals = 4\n");
}

TEST(CheckList, ContainsAnchors) {
  const std::string list = sbm::format_check_list();
  EXPECT_NE(list.find("laplace_functional → Eq. (2.1)"), std::string::npos);
  EXPECT_NE(list.find("covariance_sheet → Theorem 1.1"), std::string::npos);
  EXPECT_GE(sbm::check_registry().size(), 10u);
  for (const auto& c : sbm::check_registry()) {
    EXPECT_FALSE(c.anchor.empty()) << c.name;
    EXPECT_EQ(sbm::find_check(c.name), &c);
  }
  EXPECT_EQ(sbm::find_check("missing"), nullptr);
}

TEST(Experiment, SummaryIsByteIdenticalAcrossRuns) {
  const fs::path out = scratch("repeat");
  const auto cfg = small_stochastic(out);
  const auto a = sbm::run_experiment(cfg);
  ASSERT_NE(a.exit_code, sbm::kExitError) << a.error;
  const std::string first = slurp(out / "summary.json");
  const std::string csv = slurp(out / "covariance_sheet.csv");
  const auto b = sbm::run_experiment(cfg, overrides(1));
  ASSERT_NE(b.exit_code, sbm::kExitError) << b.error;
  EXPECT_EQ(slurp(out / "summary.json"), first);
  EXPECT_EQ(slurp(out / "covariance_sheet.csv"), csv);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "moment_first.csv"));
  EXPECT_EQ(csv.rfind("test_name,n,t,x,s,y,estimate,se,target_finite_N,target_limit,verdict\n", 0), 0u);
  EXPECT_NE(slurp(out / "manifest.json").find("wall_seconds"), std::string::npos);
  EXPECT_EQ(first.find("wall_seconds"), std::string::npos);
  fs::remove_all(out);
}

TEST(Experiment, SeedOverrideChangesResults) {
  const fs::path out = scratch("seed");
  const auto cfg = small_stochastic(out);
  ASSERT_NE(sbm::run_experiment(cfg).exit_code, sbm::kExitError);
  const std::string first = slurp(out / "summary.json");
  ASSERT_NE(sbm::run_experiment(cfg, overrides(0, 4243)).exit_code, sbm::kExitError);
  EXPECT_NE(slurp(out / "summary.json"), first);
  fs::remove_all(out);
}

TEST(Experiment, DeterministicSuitePasses) {
  const fs::path out = scratch("lemma");
  const auto cfg = sbm::load_config(std::string(SBMLAB_SOURCE_DIR) + "/configs/lemma21.cfg");
  auto local = cfg;
  local.output = out.string();
  const auto r = sbm::run_experiment(local);
  EXPECT_EQ(r.exit_code, sbm::kExitPass) << r.error;
  EXPECT_NE(slurp(out / "summary.json").find("\"verdict\": \"pass\""), std::string::npos);
  fs::remove_all(out);
}

TEST(Experiment, ExitCodes) {
  const fs::path out = scratch("codes");
  auto fail = sbm::parse_config("[experiment]\nname = f\nseed = 1\noutput = " + out.string() +
                                "\nchecks = plancherel_lemma\n[plancherel_lemma]\nn = 100, 10\n");
  EXPECT_EQ(sbm::run_experiment(fail).exit_code, sbm::kExitFail);
  auto broken = sbm::parse_config("[experiment]\nname = b\nseed = 1\noutput = " + out.string() +
                                  "\nchecks = heat_semigroup\n[heat_semigroup]\ndx = -1\n");
  const auto r = sbm::run_experiment(broken);
  EXPECT_EQ(r.exit_code, sbm::kExitError);
  EXPECT_FALSE(r.error.empty());
  auto noseed = fail;
  noseed.seed.reset();
  const auto n = sbm::run_experiment(noseed);
  EXPECT_EQ(n.exit_code, sbm::kExitError);
  EXPECT_NE(n.error.find("seed required"), std::string::npos);
  fs::remove_all(out);
}

TEST(Experiment, DumpFieldsWritesReplicaFiles) {
  const fs::path out = scratch("dump");
  auto cfg = sbm::parse_config("[experiment]\nname = d\nseed = 5\nreplicas = 3\noutput = " +
                               out.string() + "\nchecks = moment_first\n[lattice]\ndx = 0.2\nt_max = 0.1\n"
                               "[moment_first]\nt = 0.1\nmartingale_times = 0.05, 0.1\n");
  const auto r = sbm::run_experiment(cfg, overrides(0, {}, true));
  ASSERT_NE(r.exit_code, sbm::kExitError) << r.error;
  EXPECT_TRUE(fs::exists(out / "fields" / "moments_fd_r000002.csv"));
  const std::string head = slurp(out / "fields" / "moments_fd_r000000.csv").substr(0, 6);
  EXPECT_EQ(head, "t,x,u\n");
  fs::remove_all(out);
}

}  // namespace
