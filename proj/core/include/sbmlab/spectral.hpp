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

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sbmlab/lattice.hpp"

namespace sbm {

using Complex = std::complex<double>;

// Real-to-half-complex transform of length n, backed by FFTW. Plans are
// created once per size and shared; executing a plan is thread-safe.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  // spectrum[k] = sum_j values[j] exp(-2 pi i j k / n)   (unnormalised)
  void forward(std::span<const double> values, std::span<Complex> spectrum) const;
  // Exact inverse of forward (includes the 1/n factor).
  void inverse(std::span<const Complex> spectrum, std::span<double> values) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

std::shared_ptr<const FourierTransform> fourier_transform(std::size_t n);

// Angular frequencies 2 pi k / length for k = 0 .. cells/2.
std::vector<double> lattice_frequencies(const Torus& space);

// Weight of coefficient k when summing |c_k|^2 over the full symmetric
// spectrum from the half spectrum (2 except at k = 0 and at Nyquist).
double spectrum_weight(std::size_t k, std::size_t cells) noexcept;

}  // namespace sbm
