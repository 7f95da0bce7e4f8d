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

#include <cmath>
#include <vector>

#include "sbmlab/error.hpp"
#include "sbmlab/lattice.hpp"

namespace {

TEST(Lattice, DtFollowsQuarterDxSquared) {
  const auto lat = sbm::build_lattice(8.0, 0.1, 1.0, {1.0});
  EXPECT_EQ(lat.cells(), 80u);
  EXPECT_NEAR(lat.dx(), 0.1, 1e-15);
  EXPECT_NEAR(lat.dt(), 0.0025, 1e-15);
  EXPECT_EQ(lat.steps(), 400u);
}

TEST(Lattice, DxAdjustedToDivideLength) {
  const auto lat = sbm::build_lattice(8.0, 0.3, 1.0, {1.0});
  EXPECT_EQ(lat.cells(), 27u);
  EXPECT_NEAR(lat.dx(), 8.0 / 27.0, 1e-15);
}

TEST(Lattice, ObservationTimesSnap) {
  const auto lat = sbm::build_lattice(80.0, 0.05, 1.0, {0.25, 0.5, 0.75, 1.0});
  EXPECT_EQ(lat.cells(), 1600u);
  EXPECT_NEAR(lat.dt(), 6.25e-4, 1e-15);
  EXPECT_EQ(lat.steps(), 1600u);
  const std::vector<std::uint64_t> steps{400, 800, 1200, 1600};
  EXPECT_EQ(lat.observation_steps(), steps);
  for (double d : lat.snap_distances()) EXPECT_LT(d, 1e-12);
  EXPECT_EQ(lat.observation_index(0.5), 1);
  EXPECT_EQ(lat.observation_index(0.6), -1);
}

TEST(Lattice, RejectsBadInput) {
  EXPECT_THROW(sbm::build_lattice(0.0, 0.1, 1.0, {1.0}), sbm::InvalidArgument);
  EXPECT_THROW(sbm::build_lattice(8.0, 0.0, 1.0, {1.0}), sbm::InvalidArgument);
  EXPECT_THROW(sbm::build_lattice(8.0, 0.1, -1.0, {1.0}), sbm::InvalidArgument);
  EXPECT_THROW(sbm::build_lattice(8.0, 0.1, 1.0, {2.0}), sbm::InvalidArgument);
  EXPECT_THROW(sbm::build_lattice(8.0, 0.1, 1.0, {1.0}, {0.6, 1000}), sbm::InvalidArgument);
  EXPECT_THROW(sbm::build_lattice(8.0, 1e-4, 1.0, {1.0}, {0.25, 1000}), sbm::InvalidArgument);
}

TEST(Torus, WrapAndCell) {
  const auto t = sbm::build_torus(4.0, 0.5);
  EXPECT_EQ(t.cells, 8u);
  EXPECT_NEAR(t.wrap(-0.25), 3.75, 1e-15);
  EXPECT_NEAR(t.wrap(4.25), 0.25, 1e-15);
  EXPECT_EQ(t.cell_of(0.74), 1u);
  EXPECT_EQ(t.cell_of(-0.1), 7u);
  const auto s = t.scaled(0.25);
  EXPECT_NEAR(s.length, 1.0, 1e-15);
  EXPECT_EQ(s.cells, 8u);
  EXPECT_TRUE(t.same_grid(sbm::build_torus(4.0, 0.5)));
  EXPECT_FALSE(t.same_grid(s));
}

TEST(WhiteNoise, Deterministic) {
  const auto lat = sbm::build_lattice(8.0, 0.1, 1.0, {1.0});
  const auto a = sbm::white_noise_block(lat, {11, 2}, 17);
  const auto b = sbm::white_noise_block(lat, {11, 2}, 17);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sbm::white_noise_block(lat, {11, 2}, 18));
  EXPECT_NE(a, sbm::white_noise_block(lat, {11, 3}, 17));
  EXPECT_NE(a, sbm::white_noise_block(lat, {12, 2}, 17));
}

TEST(WhiteNoise, MomentsOverMillionDraws) {
  const auto lat = sbm::build_lattice(100.0, 0.1, 1.0, {1.0});  // 1000 cells
  double s = 0.0, s2 = 0.0;
  std::size_t n = 0;
  std::vector<double> block(lat.cells());
  for (std::uint64_t step = 0; step < 1000; ++step) {
    sbm::white_noise_block(lat, {20261014, 0}, step, block);
    for (double z : block) {
      s += z;
      s2 += z * z;
      ++n;
    }
  }
  ASSERT_EQ(n, 1000000u);
  const double mean = s / static_cast<double>(n);
  const double var = s2 / static_cast<double>(n) - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3e-3);
  EXPECT_NEAR(var, 1.0, 5e-3);
}

TEST(WhiteNoise, ReplicasUncorrelated) {
  const auto lat = sbm::build_lattice(100.0, 0.1, 1.0, {1.0});
  sbm::SeedPlan plan(5, 4);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  std::size_t n = 0;
  for (std::uint64_t step = 0; step < 100; ++step) {
    const auto x = sbm::white_noise_block(lat, plan.stream(0), step);
    const auto y = sbm::white_noise_block(lat, plan.stream(3), step);
    for (std::size_t j = 0; j < x.size(); ++j) {
      sxy += x[j] * y[j];
      sxx += x[j] * x[j];
      syy += y[j] * y[j];
      ++n;
    }
  }
  EXPECT_LE(std::abs(sxy / std::sqrt(sxx * syy)), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_THROW(plan.stream(4), sbm::InvalidArgument);
}

}  // namespace
