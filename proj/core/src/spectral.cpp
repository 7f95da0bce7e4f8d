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

#include "sbmlab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>

#include "sbmlab/error.hpp"

namespace sbm {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FourierTransform::FourierTransform(std::size_t n) : n_(n) {
  if (n < 2) throw InvalidArgument("transform length must be at least 2");
  std::lock_guard lock(planner_mutex());
  std::vector<double> in(n);
  std::vector<Complex> out(n / 2 + 1);
  const auto len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, reinterpret_cast<fftw_complex*>(out.data()), in.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw NumericalError("FFTW failed to create a plan");
  }
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FourierTransform::forward(std::span<const double> values, std::span<Complex> spectrum) const {
  if (values.size() != n_ || spectrum.size() != spectrum_size()) {
    throw InvalidArgument("forward transform: buffer sizes do not match the plan");
  }
  // r2c plans never write to their input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(spectrum.data()));
}

void FourierTransform::inverse(std::span<const Complex> spectrum, std::span<double> values) const {
  if (values.size() != n_ || spectrum.size() != spectrum_size()) {
    throw InvalidArgument("inverse transform: buffer sizes do not match the plan");
  }
  // c2r destroys its input, so work on a copy.
  std::vector<Complex> scratch(spectrum.begin(), spectrum.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), values.data());
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : values) v *= scale;
}

std::shared_ptr<const FourierTransform> fourier_transform(std::size_t n) {
  // Construct the planner mutex first so it outlives the cached plans.
  [[maybe_unused]] static std::mutex& planner = planner_mutex();
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::shared_ptr<const FourierTransform>> cache;
  std::lock_guard lock(cache_mutex);
  auto& plan = cache[n];
  if (!plan) plan = std::make_shared<const FourierTransform>(n);
  return plan;
}

std::vector<double> lattice_frequencies(const Torus& space) {
  std::vector<double> xi(space.cells / 2 + 1);
  const double base = 2.0 * std::numbers::pi / space.length;
  for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = base * static_cast<double>(k);
  return xi;
}

double spectrum_weight(std::size_t k, std::size_t cells) noexcept {
  if (k == 0) return 1.0;
  if (cells % 2 == 0 && k == cells / 2) return 1.0;
  return 2.0;
}

}  // namespace sbm
