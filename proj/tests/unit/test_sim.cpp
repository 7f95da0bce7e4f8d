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
#include <numeric>
#include <vector>

#include "sbmlab/duhamel.hpp"
#include "sbmlab/error.hpp"
#include "sbmlab/parallel.hpp"
#include "sbmlab/sim.hpp"
#include "sbmlab/stats.hpp"

namespace {

using sbm::SampledFunction;

constexpr std::uint64_t kSeed = 20261014;
constexpr std::size_t kReplicas = 2000;

// <X_t, 1_[0,1]> at t = 0.25, 0.5, 1 for kReplicas flat-start FD replicas.
struct FdEnsemble {
  sbm::Lattice lattice = sbm::build_lattice(4.0, 0.1, 1.0, {0.25, 0.5, 1.0});
  std::vector<std::vector<double>> x;
  std::vector<double> u0;
  FdEnsemble() : x(3, std::vector<double>(kReplicas)), u0(kReplicas) {
    const auto f = SampledFunction::indicator(lattice.space(), 0.0, 1.0);
    sbm::parallel_for(0, kReplicas, [&](std::size_t r) {
      const auto path = sbm::simulate_fd(lattice, {kSeed, static_cast<std::uint32_t>(r)});
      for (std::size_t i = 0; i < 3; ++i) x[i][r] = sbm::functional(path, i, f);
      u0[r] = path.field(2)[0];
    });
  }
};

const FdEnsemble& fd_ensemble() {
  static const FdEnsemble e;
  return e;
}

TEST(SimulateFd, ZeroNoiseKeepsFlatField) {
  const auto lat = sbm::build_lattice(4.0, 0.1, 1.0, {0.5, 1.0});
  const auto path = sbm::simulate_fd(lat, {1, 0}, {.zero_noise = true});
  ASSERT_EQ(path.time_count(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (double u : path.field(i)) ASSERT_EQ(u, 1.0);
  }
  EXPECT_EQ(path.clamp_events(), 0u);
  EXPECT_EQ(path.backend(), "fd");
}

TEST(SimulateFd, DeterministicPerReplica) {
  const auto lat = sbm::build_lattice(4.0, 0.1, 0.2, {0.1, 0.2});
  const auto a = sbm::simulate_fd(lat, {9, 4});
  const auto b = sbm::simulate_fd(lat, {9, 4});
  const auto c = sbm::simulate_fd(lat, {9, 5});
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE(std::ranges::equal(a.field(i), b.field(i)));
    EXPECT_FALSE(std::ranges::equal(a.field(i), c.field(i)));
    for (double u : a.field(i)) EXPECT_GE(u, 0.0);
  }
}

TEST(Functional, Examples) {
  const auto lat = sbm::build_lattice(4.0, 0.1, 1.0, {1.0});
  const auto path = sbm::simulate_fd(lat, {1, 0}, {.zero_noise = true});
  const auto f = SampledFunction::indicator(lat.space(), 0.0, 1.0);
  EXPECT_NEAR(sbm::functional(path, 0, f), 1.0, lat.dx());
  EXPECT_EQ(sbm::functional(path, 0, SampledFunction::constant(lat.space(), 0.0)), 0.0);
  const auto other = sbm::build_torus(4.0, 0.05);
  EXPECT_THROW(sbm::functional(path, 0, SampledFunction::constant(other, 1.0)), sbm::InvalidArgument);
  sbm::ParticleEnsemble e{1.0, 0.5, {0.2, 0.7, 1.5, 3.9}, 0};
  EXPECT_DOUBLE_EQ(e.total_mass(), 2.0);
  EXPECT_DOUBLE_EQ(sbm::functional(e, f), 1.0);
  const auto hist = sbm::density_histogram(e, lat.space());
  EXPECT_NEAR(std::accumulate(hist.begin(), hist.end(), 0.0) * lat.dx(), 2.0, 1e-12);
}

TEST(SimulateFd, FirstMomentAndMartingale) {
  const auto& e = fd_ensemble();
  std::vector<sbm::McEstimate> m;
  for (std::size_t i = 0; i < 3; ++i) {
    m.push_back(sbm::estimate_mean(e.x[i], 1.0));
    EXPECT_TRUE(m.back().passed()) << "t index " << i << " mean " << m.back().mean;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      EXPECT_LE(std::abs(m[i].mean - m[j].mean), 3.0 * std::hypot(m[i].se, m[j].se));
    }
  }
  EXPECT_TRUE(sbm::estimate_mean(e.u0, 1.0).passed());
}

TEST(SimulateFd, SecondMoment) {
  const auto& e = fd_ensemble();
  const auto f = SampledFunction::indicator(e.lattice.space(), 0.0, 1.0);
  const double target = sbm::second_moment_target(f, 1.0);
  std::vector<double> sq(e.x[2]);
  for (double& v : sq) v *= v;
  const auto est = sbm::estimate_mean(sq, target, 0.02 * target);
  EXPECT_TRUE(est.passed()) << est.mean << " vs " << target;
}

TEST(SimulateFd, LaplaceFunctional) {
  const auto& e = fd_ensemble();
  const auto f = SampledFunction::indicator(e.lattice.space(), 0.0, 1.0);
  for (double theta : {0.5, 1.0, 2.0}) {
    const double target = std::exp(-sbm::solve_log_laplace(f.scaled(theta), 1.0).final().mass());
    std::vector<double> v(e.x[2]);
    for (double& a : v) a = std::exp(-theta * a);
    const auto est = sbm::estimate_mean(v, target, 0.02 * target);
    EXPECT_TRUE(est.passed()) << "theta " << theta << ": " << est.mean << " vs " << target;
  }
}

TEST(SimulateFd, ClampFractionFallsWithDx) {
  std::vector<double> fractions;
  for (double dx : {0.2, 0.1, 0.05}) {
    const auto lat = sbm::build_lattice(4.0, dx, 1.0, {1.0});
    double sum = 0.0;
    const std::size_t reps = 40;
    for (std::uint32_t r = 0; r < reps; ++r) sum += sbm::simulate_fd(lat, {kSeed, r}).clamp_fraction();
    fractions.push_back(sum / reps);
  }
  EXPECT_GT(fractions[0], 0.0);
  EXPECT_GT(fractions[0], fractions[1]);
  EXPECT_GT(fractions[1], fractions[2]);
}

TEST(SimulateParticles, MomentsAtSmallMassResolution) {
  const double m = 20.0;
  const auto lat = sbm::build_lattice(4.0, 0.1, 1.0, {1.0});
  const auto f = SampledFunction::indicator(lat.space(), 0.0, 1.0);
  std::vector<double> mass(kReplicas), x(kReplicas), dev2(kReplicas);
  for (std::uint32_t r = 0; r < kReplicas; ++r) {
    const auto snaps = sbm::simulate_particles(m, lat, 1.0, {kSeed, r});
    ASSERT_EQ(snaps.size(), 1u);
    mass[r] = snaps[0].total_mass();
    x[r] = sbm::functional(snaps[0], f);
    dev2[r] = (x[r] - 1.0) * (x[r] - 1.0);
  }
  EXPECT_TRUE(sbm::estimate_mean(mass, lat.length()).passed());
  EXPECT_TRUE(sbm::estimate_mean(x, f.mass()).passed());
  // Branching variance plus the Poisson variance of the initial condition.
  const double pt = sbm::apply_semigroup(f, 1.0).inner(sbm::apply_semigroup(f, 1.0));
  const double var = sbm::second_moment_target(f, 1.0) - 1.0 + pt / m;
  const auto est = sbm::estimate_mean(dev2, var);
  EXPECT_TRUE(est.passed()) << est.mean << " vs " << var;
}

TEST(SimulateParticles, PopulationCap) {
  const auto lat = sbm::build_lattice(4.0, 0.1, 1.0, {1.0});
  EXPECT_THROW(sbm::simulate_particles(50.0, lat, 1.0, {1, 0}, {.population_cap = 20}),
               sbm::NumericalError);
  EXPECT_THROW(sbm::simulate_particles(0.5, lat, 1.0, {1, 0}), sbm::InvalidArgument);
}

TEST(SimulateParticles, Deterministic) {
  const auto lat = sbm::build_lattice(4.0, 0.1, 0.5, {0.25, 0.5});
  const auto a = sbm::simulate_particles(10.0, lat, 0.5, {3, 1});
  const auto b = sbm::simulate_particles(10.0, lat, 0.5, {3, 1});
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a[i].positions, b[i].positions);
}

TEST(SecondMomentTarget, ZeroFunction) {
  const auto space = sbm::build_torus(4.0, 0.1);
  EXPECT_EQ(sbm::second_moment_target(SampledFunction::constant(space, 0.0), 1.0), 0.0);
}

}  // namespace
