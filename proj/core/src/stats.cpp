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

#include "sbmlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sbmlab/error.hpp"

namespace sbm {

void RunningMoments::add(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double RunningMoments::variance() const noexcept {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningMoments::stdev() const noexcept { return std::sqrt(variance()); }

double RunningMoments::standard_error() const noexcept {
  return count_ == 0 ? 0.0 : stdev() / std::sqrt(static_cast<double>(count_));
}

CrossMoments::CrossMoments(std::size_t dimension)
    : dim_(dimension), mean_(dimension, 0.0), comoment_(dimension * dimension, 0.0) {
  if (dimension == 0) throw InvalidArgument("cross moments need dimension >= 1");
}

void CrossMoments::add(std::span<const double> x) {
  if (x.size() != dim_) throw InvalidArgument("cross moments: dimension mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  std::vector<double> before(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    before[i] = x[i] - mean_[i];
    mean_[i] += before[i] / n;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double after = x[i] - mean_[i];
    for (std::size_t j = 0; j < dim_; ++j) comoment_[i * dim_ + j] += after * before[j];
  }
}

void CrossMoments::merge(const CrossMoments& other) {
  if (other.dim_ != dim_) throw InvalidArgument("cross moments: dimension mismatch");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  std::vector<double> delta(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      comoment_[i * dim_ + j] += other.comoment_[i * dim_ + j] + delta[i] * delta[j] * na * nb / n;
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta[i] * nb / n;
  count_ += other.count_;
}

double CrossMoments::covariance(std::size_t i, std::size_t j) const {
  if (i >= dim_ || j >= dim_) throw InvalidArgument("cross moments: index out of range");
  return count_ < 2 ? 0.0 : comoment_[i * dim_ + j] / static_cast<double>(count_ - 1);
}

double McEstimate::deviation() const noexcept { return std::abs(mean - target); }

McEstimate estimate_mean(std::span<const double> samples, double target, double slack,
                         double sigmas) {
  RunningMoments m;
  for (double x : samples) m.add(x);
  return {m.mean(), m.standard_error(), m.count(), target, slack, sigmas};
}

McEstimate estimate_covariance(std::span<const double> x, std::span<const double> y,
                               double target, double slack, double sigmas) {
  if (x.size() != y.size()) throw InvalidArgument("covariance: sample sizes differ");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("covariance needs at least two samples");
  RunningMoments mx, my;
  for (std::size_t r = 0; r < n; ++r) {
    mx.add(x[r]);
    my.add(y[r]);
  }
  RunningMoments products;
  for (std::size_t r = 0; r < n; ++r) products.add((x[r] - mx.mean()) * (y[r] - my.mean()));
  const double nd = static_cast<double>(n);
  McEstimate e;
  e.mean = products.mean() * nd / (nd - 1.0);
  e.se = products.standard_error();
  e.count = n;
  e.target = target;
  e.slack = slack;
  e.sigmas = sigmas;
  return e;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> samples) {
  if (samples.empty()) throw InvalidArgument("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = normal_cdf(samples[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n));
  }
  return d;
}

double kolmogorov_pvalue(double statistic, std::size_t n) noexcept {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("least squares needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("least squares with a constant abscissa");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace sbm
