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
#include <vector>

#include "sbmlab/lattice.hpp"
#include "sbmlab/spectral.hpp"

namespace sbm {

// A real function sampled on a torus, one value per cell, with its norms
// and lattice Fourier coefficients computed once at construction.
//
// Integrals use the cell rule: <lambda, f> = dx * sum_j f_j. The Fourier
// coefficients are fhat_k = dx * sum_j f_j exp(-i xi_k x_j) with
// xi_k = 2 pi k / length, k = 0 .. cells/2.
class SampledFunction {
 public:
  SampledFunction(const Torus& space, std::vector<double> values);

  template <class F>
  static SampledFunction evaluate(const Torus& space, F&& f) {
    std::vector<double> v(space.cells);
    for (std::size_t j = 0; j < space.cells; ++j) v[j] = f(space.node(j));
    return SampledFunction(space, std::move(v));
  }
  static SampledFunction constant(const Torus& space, double c);
  // 1_[a, b) with each cell weighted by the fraction of it covered by [a, b).
  static SampledFunction indicator(const Torus& space, double a, double b);
  static SampledFunction from_fourier(const Torus& space, std::span<const Complex> coefficients);

  const Torus& space() const noexcept { return space_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  // Piecewise-constant evaluation at an arbitrary (wrapped) position.
  double at(double x) const noexcept { return values_[space_.cell_of(x)]; }

  double mass() const noexcept { return mass_; }
  double l1_norm() const noexcept { return l1_; }
  double l2_norm() const noexcept { return l2_; }
  double sup_norm() const noexcept { return sup_; }
  // Nonnegative and bounded: the class the Laplace functional is defined on.
  bool admissible() const noexcept { return admissible_; }
  const std::vector<Complex>& fourier() const noexcept { return fourier_; }

  double inner(const SampledFunction& other) const;
  SampledFunction scaled(double factor) const;
  SampledFunction operator+(const SampledFunction& other) const;

 private:
  Torus space_;
  std::vector<double> values_;
  std::vector<Complex> fourier_;
  double mass_ = 0.0;
  double l1_ = 0.0;
  double l2_ = 0.0;
  double sup_ = 0.0;
  bool admissible_ = false;
};

// Gaussian heat kernel (2 pi t)^{-1/2} exp(-x^2 / (2t)).
double heat_kernel(double t, double x);

// P_t f on the torus: the k-th Fourier coefficient is multiplied by
// exp(-t xi_k^2 / 2). t = 0 returns f unchanged.
SampledFunction apply_semigroup(const SampledFunction& f, double t);

// In-place multiplier on a half spectrum laid out like FourierTransform.
void apply_heat_multiplier(std::span<Complex> spectrum, std::span<const double> xi, double t);

// f^(N)(x) = N^{-1/2} f(x / N) sampled on `target`. Throws if part of the
// support of f would land beyond the target period.
SampledFunction scale_function(const SampledFunction& f, double n_scale, const Torus& target);

// int_0^t ds int P_{s+r1} f^(N)(y) P_{s+r2} g^(N)(y) dy for f, g given at
// unit scale. Evaluated per frequency with the time integral in closed
// form; the zero frequency contributes t * fhat(0) * ghat(0).
//
// The unit-scale torus of length L stands for the N-scale torus of length
// N*L, so the result is exact for that torus up to roundoff.
double plancherel_pair_integral(const SampledFunction& f, const SampledFunction& g, double t,
                                double r1, double r2, double n_scale);

// |Fourier transform of 1_[y,x]|^2 at frequency a: 2(1 - cos((x-y)a)) / a^2,
// equal to (x-y)^2 at a = 0.
double indicator_fourier_sq(double x, double y, double a) noexcept;

}  // namespace sbm
