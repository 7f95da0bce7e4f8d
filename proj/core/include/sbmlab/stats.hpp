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
#include <span>
#include <string>
#include <vector>

namespace sbm {

// Streaming mean and variance with the pairwise (Chan et al.) merge, so a
// fixed merge tree gives results independent of scheduling.
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  // Unbiased (n - 1) sample variance; 0 below two samples.
  double variance() const noexcept;
  double stdev() const noexcept;
  double standard_error() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Streaming means and co-moments of a fixed-dimension vector.
class CrossMoments {
 public:
  explicit CrossMoments(std::size_t dimension);

  void add(std::span<const double> x);
  void merge(const CrossMoments& other);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t count() const noexcept { return count_; }
  double mean(std::size_t i) const { return mean_.at(i); }
  double covariance(std::size_t i, std::size_t j) const;

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // row-major dim x dim
};

// A Monte Carlo scalar with its verdict rule |mean - target| <= sigmas*se + slack.
struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  double target = 0.0;
  double slack = 0.0;
  double sigmas = 3.0;

  double deviation() const noexcept;
  double tolerance() const noexcept { return sigmas * se + slack; }
  bool passed() const noexcept { return deviation() <= tolerance(); }
};

McEstimate estimate_mean(std::span<const double> samples, double target, double slack = 0.0,
                         double sigmas = 3.0);

// Sample covariance of (x, y) with the standard error of the mean of the
// centred products (delta method, centring error ignored).
McEstimate estimate_covariance(std::span<const double> x, std::span<const double> y,
                               double target, double slack = 0.0, double sigmas = 3.0);

double normal_cdf(double x) noexcept;

// sup |F_n - Phi| of the sample against the standard normal.
double ks_statistic_normal(std::vector<double> samples);

// P(sqrt(n) D_n > d sqrt(n)) from the Kolmogorov limit law with the
// Stephens small-sample correction.
double kolmogorov_pvalue(double statistic, std::size_t n) noexcept;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace sbm
