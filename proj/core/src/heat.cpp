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

#include "sbmlab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sbmlab/error.hpp"

namespace sbm {

SampledFunction::SampledFunction(const Torus& space, std::vector<double> values)
    : space_(space), values_(std::move(values)) {
  if (values_.size() != space_.cells) {
    throw InvalidArgument("sampled function needs one value per cell");
  }
  double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0, sup = 0.0;
  bool admissible = true;
  for (double v : values_) {
    sum += v;
    abs_sum += std::abs(v);
    sq_sum += v * v;
    sup = std::max(sup, std::abs(v));
    if (!(v >= 0.0) || !std::isfinite(v)) admissible = false;
  }
  mass_ = space_.dx * sum;
  l1_ = space_.dx * abs_sum;
  l2_ = std::sqrt(space_.dx * sq_sum);
  sup_ = sup;
  admissible_ = admissible;

  const auto plan = fourier_transform(space_.cells);
  fourier_.resize(plan->spectrum_size());
  plan->forward(values_, fourier_);
  for (Complex& c : fourier_) c *= space_.dx;
}

SampledFunction SampledFunction::constant(const Torus& space, double c) {
  return SampledFunction(space, std::vector<double>(space.cells, c));
}

SampledFunction SampledFunction::indicator(const Torus& space, double a, double b) {
  if (b < a) throw InvalidArgument("indicator needs a <= b");
  if (b - a > space.length * (1.0 + 1e-12)) {
    throw InvalidArgument("indicator interval longer than the torus");
  }
  std::vector<double> v(space.cells, 0.0);
  // Work in cell units; snap endpoints that sit on a cell boundary up to
  // roundoff so aligned intervals give exact 0/1 weights.
  auto snap = [](double u) {
    const double r = std::round(u);
    return std::abs(u - r) <= 1e-9 * std::max(1.0, std::abs(u)) ? r : u;
  };
  const double lo = snap(a / space.dx);
  const double hi = snap(b / space.dx);
  const auto first = static_cast<long long>(std::floor(lo));
  const auto n = static_cast<long long>(space.cells);
  for (long long c = first; static_cast<double>(c) < hi; ++c) {
    const double overlap = std::min(hi, static_cast<double>(c + 1)) - std::max(lo, static_cast<double>(c));
    if (overlap <= 0.0) continue;
    const long long wrapped = ((c % n) + n) % n;
    v[static_cast<std::size_t>(wrapped)] += overlap;
  }
  return SampledFunction(space, std::move(v));
}

SampledFunction SampledFunction::from_fourier(const Torus& space,
                                              std::span<const Complex> coefficients) {
  const auto plan = fourier_transform(space.cells);
  if (coefficients.size() != plan->spectrum_size()) {
    throw InvalidArgument("coefficient count does not match the torus");
  }
  std::vector<Complex> unscaled(coefficients.begin(), coefficients.end());
  for (Complex& c : unscaled) c /= space.dx;
  std::vector<double> v(space.cells);
  plan->inverse(unscaled, v);
  return SampledFunction(space, std::move(v));
}

double SampledFunction::inner(const SampledFunction& other) const {
  if (!space_.same_grid(other.space_)) throw InvalidArgument("inner product across different grids");
  double s = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) s += values_[j] * other.values_[j];
  return space_.dx * s;
}

SampledFunction SampledFunction::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return SampledFunction(space_, std::move(v));
}

SampledFunction SampledFunction::operator+(const SampledFunction& other) const {
  if (!space_.same_grid(other.space_)) throw InvalidArgument("sum across different grids");
  std::vector<double> v(values_);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += other.values_[j];
  return SampledFunction(space_, std::move(v));
}

double heat_kernel(double t, double x) {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel needs t > 0");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

void apply_heat_multiplier(std::span<Complex> spectrum, std::span<const double> xi, double t) {
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= std::exp(-0.5 * t * xi[k] * xi[k]);
}

SampledFunction apply_semigroup(const SampledFunction& f, double t) {
  if (t < 0.0) throw InvalidArgument("semigroup time must be nonnegative");
  if (t == 0.0) return f;
  std::vector<Complex> spectrum(f.fourier());
  apply_heat_multiplier(spectrum, lattice_frequencies(f.space()), t);
  return SampledFunction::from_fourier(f.space(), spectrum);
}

SampledFunction scale_function(const SampledFunction& f, double n_scale, const Torus& target) {
  if (!(n_scale > 0.0)) throw InvalidArgument("scale N must be positive");
  const Torus& src = f.space();
  // Highest point of the support, measured at the right edge of its cell.
  double support_end = 0.0;
  for (std::size_t j = 0; j < src.cells; ++j) {
    if (f[j] != 0.0) support_end = src.node(j) + src.dx;
  }
  if (support_end * n_scale > target.length * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "scaled support [0, " << support_end * n_scale << ") overflows the target period "
        << target.length;
    throw InvalidArgument(msg.str());
  }
  const double amplitude = 1.0 / std::sqrt(n_scale);
  std::vector<double> v(target.cells, 0.0);
  for (std::size_t j = 0; j < target.cells; ++j) {
    // Sample at the cell midpoint so aligned grids map cell to cell exactly.
    const double u = (target.node(j) + 0.5 * target.dx) / n_scale;
    if (u >= src.length) continue;
    v[j] = amplitude * f[src.cell_of(u)];
  }
  return SampledFunction(target, std::move(v));
}

double plancherel_pair_integral(const SampledFunction& f, const SampledFunction& g, double t,
                                double r1, double r2, double n_scale) {
  if (!f.space().same_grid(g.space())) throw InvalidArgument("f and g live on different grids");
  if (!(t > 0.0)) throw InvalidArgument("time horizon must be positive");
  if (r1 < 0.0 || r2 < 0.0) throw InvalidArgument("time shifts must be nonnegative");
  if (!(n_scale > 0.0)) throw InvalidArgument("scale N must be positive");

  const Torus& space = f.space();
  const auto xi = lattice_frequencies(space);
  const auto& fh = f.fourier();
  const auto& gh = g.fourier();
  const double shift = 0.5 * (r1 + r2);
  const double inv_n2 = 1.0 / (n_scale * n_scale);

  double total = 0.0;
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const double cross = fh[k].real() * gh[k].real() + fh[k].imag() * gh[k].imag();
    double time_weight;
    if (k == 0) {
      time_weight = t;
    } else {
      // int_0^t exp(-(s + shift) u) ds with u = xi^2 / N^2.
      const double u = xi[k] * xi[k] * inv_n2;
      time_weight = std::exp(-shift * u) * (-std::expm1(-t * u)) / u;
    }
    total += spectrum_weight(k, space.cells) * cross * time_weight;
  }
  return total / space.length;
}

double indicator_fourier_sq(double x, double y, double a) noexcept {
  const double w = x - y;
  if (a == 0.0) return w * w;
  const double s = std::sin(0.5 * w * a);
  return 4.0 * s * s / (a * a);
}

}  // namespace sbm
