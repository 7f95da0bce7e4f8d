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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbmlab/heat.hpp"
#include "sbmlab/lattice.hpp"
#include "sbmlab/sim.hpp"
#include "sbmlab/stats.hpp"

namespace sbm {

// Observation grid {(t_k, x_l)} of the rescaled field. Both axes ascending
// and nonnegative; 0 may be included (those rows and columns are 0).
struct SheetGrid {
  std::vector<double> times;
  std::vector<double> xs;

  // {0, 1/n, ..., 1} on both axes.
  static SheetGrid uniform(std::size_t intervals);

  void validate() const;
  std::size_t time_index(double t) const;
  std::size_t x_index(double x) const;
  std::size_t size() const noexcept { return times.size() * xs.size(); }
};

class SheetSample {
 public:
  SheetSample(SheetGrid grid, double n_scale, std::uint32_t replica, std::vector<double> values);

  const SheetGrid& grid() const noexcept { return grid_; }
  // +infinity for samples of the limit sheet.
  double n_scale() const noexcept { return n_scale_; }
  std::uint32_t replica() const noexcept { return replica_; }
  double operator()(std::size_t time_index, std::size_t x_index) const {
    return values_[time_index * grid_.xs.size() + x_index];
  }
  double at(double t, double x) const { return (*this)(grid_.time_index(t), grid_.x_index(x)); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  SheetGrid grid_;
  double n_scale_;
  std::uint32_t replica_;
  std::vector<double> values_;
};

// int_a^b (u(z) - 1) dz for the piecewise-constant density u, 0 <= a <= b <= L,
// partial cells weighted linearly.
double excess_mass(std::span<const double> u, const Torus& space, double a, double b);

// V_N(t, x) = N^{-1/2} int_0^{xN} (u(t, z) - 1) dz on the grid.
SheetSample compute_sheet(const DensityPath& path, double n_scale, const SheetGrid& grid);

// N^{-1/2} int_{x_lo N}^{x_hi N} (u(t, z) - 1) dz at observation index time_index.
double sheet_increment(const DensityPath& path, std::size_t time_index, double n_scale,
                       double x_lo, double x_hi);

// Brownian-sheet replica on the grid from independent cell masses
// N(0, dt dx), drawn from the synthetic stream domain.
SheetSample synthetic_sheet(const SheetGrid& grid, const NoiseStream& stream);

// Covariance targets of V_N. Without a simulation torus this is the limit
// (t^s)(x^y); with one it is the finite-N Fourier quadrature
//   int_0^{t^s} <lambda, P_{r+t-a} f^(N) P_{r+s-a} g^(N)> dr,
// f = 1_[0,x], g = 1_[0,y], a = t^s, on the unit torus (L/N, dx/N).
class SheetOracle {
 public:
  SheetOracle() = default;
  SheetOracle(const Torus& simulation_space, double n_scale);

  bool finite() const noexcept { return unit_space_.has_value(); }
  double n_scale() const noexcept { return n_scale_; }
  double covariance(double t, double x, double s, double y) const;
  static double limit(double t, double x, double s, double y) noexcept;

 private:
  std::optional<Torus> unit_space_;
  double n_scale_ = 0.0;
};

struct CovarianceEntry {
  double t = 0.0, x = 0.0, s = 0.0, y = 0.0;
  McEstimate estimate;  // target = finite-N oracle value
  double limit = 0.0;
  bool within_limit = false;
  bool passed = false;
};

struct CovarianceReport {
  std::vector<CovarianceEntry> entries;
  double limit_tolerance = 0.0;
  std::size_t se_failures = 0;
  std::size_t limit_failures = 0;
  bool passed = false;
};

// Every unordered pair of points of {times} x {xs} (diagonal included). Each
// pair passes when within `sigmas` SE of the oracle and, if limit_tolerance
// > 0, within limit_tolerance of the limit.
CovarianceReport covariance_check(std::span<const SheetSample> samples,
                                  std::span<const double> times, std::span<const double> xs,
                                  const SheetOracle& oracle, double limit_tolerance = 0.0,
                                  double sigmas = 3.0);

struct NormalityReport {
  double t = 0.0, x = 0.0;
  bool degenerate = false;
  std::string note;
  McEstimate mean;  // target 0
  double reference_variance = 0.0;
  double statistic = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  bool passed = false;
};

// One-sample KS of V_N(t, x) / sqrt(v) against N(0, 1), v the oracle
// variance; pass when D_R <= 1.63 / sqrt(R).
NormalityReport normality_check(std::span<const SheetSample> samples, double t, double x,
                                const SheetOracle& oracle);
// Same test on plain samples with a given reference variance.
NormalityReport normality_check(std::span<const double> values, double reference_variance);

struct FddPoint {
  double t = 0.0;
  double x = 0.0;
  double theta = 0.0;
};

struct FddTargets {
  double finite_exponent = 0.0;
  double limit_exponent = 0.0;
};

// Exponents of E exp(-sum theta_k V_N(t_k, x_k)): the iterated log-Laplace
// exponent on target (the N-scale torus) and the Gaussian limit.
// Points must have strictly decreasing times.
FddTargets fdd_targets(std::span<const FddPoint> points, double n_scale, const Torus& target);

struct FddReport {
  std::vector<FddPoint> points;
  McEstimate estimate;  // target = exp(finite exponent)
  double limit_target = 0.0;
  double limit_gap = 0.0;
  bool passed = false;
};

FddReport fdd_laplace_check(std::span<const SheetSample> samples, std::span<const FddPoint> points,
                            const FddTargets& targets, double sigmas = 3.0);

struct HolderLadder {
  std::vector<double> lags;     // lag (or rectangle area)
  std::vector<double> moments;  // sample E|increment|^k
  double slope = 0.0;
  double target = 0.0;
  bool passed = false;
};

struct HolderReport {
  int order = 0;
  HolderLadder spatial;
  HolderLadder temporal;
  HolderLadder rectangle;  // abscissa = |t-s| |x-y|
  bool rectangle_asserted = false;
  bool passed = false;
};

struct HolderOptions {
  std::vector<std::size_t> lag_steps{1, 2, 4, 8};
  double margin = 0.3;
  double rectangle_floor = 0.95;
};

// Log-log slopes of k-th absolute moments of sheet increments on a uniform
// grid: in x at the last time row, in t at the last x column, and of
// rectangle increments over the whole grid, each averaged over base points.
HolderReport holder_check(std::span<const SheetSample> samples, int order,
                          const HolderOptions& options = {});

}  // namespace sbm
