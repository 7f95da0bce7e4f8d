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

#include <algorithm>
#include <cmath>
#include <vector>

#include "sbmlab/checks.hpp"
#include "sbmlab/duhamel.hpp"
#include "sbmlab/error.hpp"

namespace {

using sbm::FddSpec;
using sbm::SampledFunction;

FddSpec indicator_spec(double n, std::vector<double> times, std::vector<double> xs,
                       std::vector<double> thetas, double dx = 0.05) {
  FddSpec spec;
  spec.n_scale = n;
  const double extent = *std::max_element(xs.begin(), xs.end()) * n;
  spec.target = sbm::build_torus(std::ceil((2.0 * extent + 12.0 * std::sqrt(times.front())) / dx) * dx, dx);
  const auto unit = spec.target.scaled(1.0 / n);
  for (std::size_t k = 0; k < times.size(); ++k) {
    spec.functions.push_back(SampledFunction::indicator(unit, 0.0, xs[k]).scaled(thetas[k]));
  }
  spec.times = std::move(times);
  return spec;
}

TEST(SolveV, ZeroData) {
  const auto space = sbm::build_torus(8.0, 0.05);
  const auto sol = sbm::solve_log_laplace(SampledFunction::constant(space, 0.0), 1.0);
  for (double v : sol.final().values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(sbm::inner_identity_residual(SampledFunction::constant(space, 0.0), 1.0), 0.0);
}

TEST(SolveV, ConstantDataClosedForm) {
  const auto space = sbm::build_torus(8.0, 0.05);
  for (double c : {0.5, 2.0, 5.0}) {
    const auto sol = sbm::solve_log_laplace(SampledFunction::constant(space, c), 1.0);
    const double exact = c / (1.0 + c / 2.0);
    for (double v : sol.final().values()) ASSERT_NEAR(v, exact, 1e-6) << "c=" << c;
  }
  const auto sol = sbm::solve_log_laplace(SampledFunction::constant(space, 2.0), 1.0);
  EXPECT_NEAR(sol.final()[17], 1.0, 1e-6);
}

TEST(SolveV, InitialSliceIsData) {
  const auto space = sbm::build_torus(8.0, 0.05);
  const auto f = sbm::random_admissible(space, 1, 0);
  sbm::DuhamelOptions opts;
  opts.snapshots = 5;
  const auto sol = sbm::solve_log_laplace(f, 1.0, opts);
  ASSERT_EQ(sol.times().size(), 5u);
  EXPECT_EQ(sol.times().front(), 0.0);
  EXPECT_DOUBLE_EQ(sol.times().back(), 1.0);
  const auto v0 = sol.fields().front().values();
  EXPECT_TRUE(std::equal(v0.begin(), v0.end(), f.values().begin()));
}

TEST(SolveV, RejectsInadmissibleData) {
  const auto space = sbm::build_torus(8.0, 0.05);
  EXPECT_THROW(sbm::solve_log_laplace(SampledFunction::constant(space, -1.0), 1.0),
               sbm::InvalidArgument);
  EXPECT_THROW(sbm::solve_log_laplace(SampledFunction::constant(space, 1.0), -1.0),
               sbm::InvalidArgument);
}

TEST(InnerIdentity, ConstantOnLengthEight) {
  const auto space = sbm::build_torus(8.0, 0.05);
  const auto f = SampledFunction::constant(space, 2.0);
  const auto sol = sbm::solve_log_laplace(f, 1.0);
  EXPECT_NEAR(f.mass(), 16.0, 1e-12);
  EXPECT_NEAR(sol.final().mass(), 8.0, 1e-5);
  EXPECT_NEAR(0.5 * sol.square_integral(), 8.0, 1e-5);
  EXPECT_LE(sbm::inner_identity_residual(sol), 1e-6 * 16.0);
}

TEST(InnerIdentity, RandomData) {
  const auto space = sbm::build_torus(16.0, 0.05);
  for (std::uint32_t i = 0; i < 20; ++i) {
    const auto f = sbm::random_admissible(space, 77, i);
    const auto sol = sbm::solve_log_laplace(f, 1.0);
    EXPECT_LE(sbm::inner_identity_residual(sol), 1e-6 * f.mass()) << "function " << i;
    EXPECT_LE(sol.diagnostics().residual, 1e-8 * (1.0 + f.sup_norm()));
  }
}

TEST(InnerIdentity, StableUnderStepHalving) {
  const auto space = sbm::build_torus(16.0, 0.05);
  const auto f = sbm::random_admissible(space, 78, 0);
  sbm::DuhamelOptions fine;
  fine.time_step = 0.25 * space.dx * space.dx / 2.0;
  const auto a = sbm::solve_log_laplace(f, 1.0);
  const auto b = sbm::solve_log_laplace(f, 1.0, fine);
  EXPECT_LE(std::abs(a.square_integral() - b.square_integral()), 1e-6 * f.mass());
  EXPECT_LE(sbm::inner_identity_residual(b), 1e-6 * f.mass());
}

TEST(SolveV, GridRefinement) {
  // Smooth data sampled on two nested grids; coincident nodes must agree.
  auto bumps = [](double x) {
    return 1.5 * std::exp(-2.0 * (x - 5.0) * (x - 5.0)) + 0.7 * std::exp(-0.5 * (x - 9.0) * (x - 9.0));
  };
  const auto coarse = sbm::build_torus(16.0, 0.1);
  const auto fine = sbm::build_torus(16.0, 0.05);
  const auto fc = SampledFunction::evaluate(coarse, bumps);
  const auto ff = SampledFunction::evaluate(fine, bumps);
  const auto vc = sbm::solve_log_laplace(fc, 1.0);
  const auto vf = sbm::solve_log_laplace(ff, 1.0);
  double d = 0.0;
  for (std::size_t j = 0; j < coarse.cells; ++j) d = std::max(d, std::abs(vc.final()[j] - vf.final()[2 * j]));
  EXPECT_LE(d, 4.0 * 1e-6 * fc.mass());
}

TEST(SolveV, BoundsAndMonotonicity) {
  const auto space = sbm::build_torus(16.0, 0.05);
  sbm::DuhamelOptions opts;
  opts.snapshots = 9;
  for (std::uint32_t i = 0; i < 5; ++i) {
    const auto f = sbm::random_admissible(space, 11, i);
    const auto g = f + sbm::random_admissible(space, 12, i);
    const auto vf = sbm::solve_log_laplace(f, 1.0, opts);
    const auto vg = sbm::solve_log_laplace(g, 1.0, opts);
    EXPECT_LE(sbm::comparison_violation(vf, f), 1e-12 * (1.0 + f.sup_norm()));
    for (std::size_t k = 0; k < vf.fields().size(); ++k) {
      const auto p = sbm::apply_semigroup(f, vf.times()[k]);
      for (std::size_t j = 0; j < space.cells; ++j) {
        ASSERT_GE(vf.fields()[k][j], -1e-12 * (1.0 + f.sup_norm()));
        ASSERT_LE(vf.fields()[k][j], p[j] + 1e-12 * (1.0 + f.sup_norm()));
        ASSERT_LE(vf.fields()[k][j], vg.fields()[k][j] + 1e-12 * (1.0 + g.sup_norm()));
      }
    }
  }
}

TEST(GaussianExponent, ClosedFormCases) {
  const auto unit = sbm::build_torus(4.0, 1e-3);
  const auto one = SampledFunction::indicator(unit, 0.0, 1.0);
  const auto part = SampledFunction::indicator(unit, 0.0, 0.3);
  {
    const std::vector<double> t{0.8};
    const std::vector<SampledFunction> f{part};
    EXPECT_NEAR(sbm::gaussian_limit_exponent(t, f), 0.5 * 0.8 * 0.3, 1e-12);
  }
  {
    const std::vector<double> t{1.0, 0.5};
    const std::vector<SampledFunction> f{one, one};
    EXPECT_NEAR(sbm::gaussian_limit_exponent(t, f), 1.25, 1e-12);
  }
  {
    const auto a = SampledFunction::indicator(unit, 0.0, 0.5);
    const auto b = SampledFunction::indicator(unit, 1.0, 1.75);
    const std::vector<double> t{1.0, 0.4};
    const std::vector<SampledFunction> f{a, b};
    EXPECT_NEAR(sbm::gaussian_limit_exponent(t, f), 0.5 * (1.0 * 0.5 + 0.4 * 0.75), 1e-12);
  }
}

TEST(GaussianExponent, MergingEqualTimes) {
  const auto unit = sbm::build_torus(4.0, 1e-3);
  const auto f1 = sbm::random_admissible(unit, 3, 0);
  const auto f2 = sbm::random_admissible(unit, 3, 1);
  const auto f3 = sbm::random_admissible(unit, 3, 2);
  const std::vector<double> split_t{0.9, 0.4, 0.4};
  const std::vector<SampledFunction> split_f{f1, f2, f3};
  const std::vector<double> merged_t{0.9, 0.4};
  const std::vector<SampledFunction> merged_f{f1, f2 + f3};
  EXPECT_NEAR(sbm::gaussian_limit_exponent(split_t, split_f),
              sbm::gaussian_limit_exponent(merged_t, merged_f), 1e-12);
}

TEST(IteratedExponent, ZeroWeightsGiveZero) {
  const auto spec = indicator_spec(16.0, {1.0, 0.5}, {1.0, 1.0}, {0.0, 0.0});
  EXPECT_EQ(sbm::iterated_exponent(spec).exponent, 0.0);
}

TEST(IteratedExponent, RejectsBadSpecs) {
  auto spec = indicator_spec(16.0, {1.0, 0.5}, {1.0, 1.0}, {1.0, 1.0});
  spec.times = {0.5, 1.0};
  EXPECT_THROW(sbm::iterated_exponent(spec), sbm::InvalidArgument);
  spec.times = {1.0};
  EXPECT_THROW(sbm::iterated_exponent(spec), sbm::InvalidArgument);
}

TEST(IteratedExponent, SingleIndicatorDefectScalesLikeRootN) {
  // The first correction to 1/2 t <f,f> is -1/4 N^{-1/2} for f = 1_[0,1],
  // t = 1 (expand V = P f - 1/2 int P V^2 once). At N = 100 that is a 5%
  // deficit, of the same size as the majorant.
  for (double n : {100.0, 400.0}) {
    const auto spec = indicator_spec(n, {1.0}, {1.0}, {1.0});
    const auto bounds = sbm::limit_defect_bounds(spec);
    EXPECT_NEAR(bounds.limit, 0.5, 1e-12);
    const double defect = bounds.limit - bounds.exponent;
    EXPECT_GT(defect, 0.0);
    EXPECT_TRUE(bounds.consistent);
    EXPECT_NEAR(defect * std::sqrt(n), 0.25, 0.03) << "N=" << n;
  }
}

TEST(DefectBounds, MajorantExamples) {
  for (double n : {16.0, 64.0}) {
    const auto b = sbm::limit_defect_bounds(indicator_spec(n, {1.0}, {1.0}, {1.0}));
    ASSERT_EQ(b.segments.size(), 1u);
    EXPECT_NEAR(b.segments[0].quadratic, 0.5 / std::sqrt(n), 1e-9);
    EXPECT_NEAR(b.segments[0].cubic, 1.0 / (8.0 * n), 1e-9);
    EXPECT_NEAR(b.segments[0].duration, 1.0, 1e-15);
    EXPECT_TRUE(b.consistent);
  }
}

TEST(DefectBounds, TwoTimeSpecConvergesAtRootNRate) {
  std::vector<double> defects;
  for (double n : {16.0, 32.0, 64.0}) {
    const auto b = sbm::limit_defect_bounds(indicator_spec(n, {1.0, 0.5}, {1.0, 1.0}, {1.0, 1.0}));
    EXPECT_NEAR(b.limit, 1.25, 1e-12);
    EXPECT_TRUE(b.consistent);
    defects.push_back(b.observed_defect);
  }
  EXPECT_GE(defects[0] / defects[1], 1.3);
  EXPECT_GE(defects[1] / defects[2], 1.3);
}

}  // namespace
