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

#include "sbmlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbmlab/error.hpp"
#include "sbmlab/philox.hpp"

namespace sbm {

std::size_t Torus::cell_of(double x) const noexcept {
  const double w = wrap(x);
  auto j = static_cast<std::size_t>(w / dx);
  return j >= cells ? cells - 1 : j;
}

double Torus::wrap(double x) const noexcept {
  double w = std::fmod(x, length);
  if (w < 0.0) w += length;
  if (w >= length) w = 0.0;
  return w;
}

Torus Torus::scaled(double factor) const noexcept {
  return Torus{length * factor, dx * factor, cells};
}

bool Torus::same_grid(const Torus& other) const noexcept {
  return cells == other.cells && std::abs(dx - other.dx) <= 1e-12 * std::max(dx, other.dx);
}

Torus build_torus(double length, double dx_request) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("torus length must be positive and finite");
  }
  if (!(dx_request > 0.0)) throw InvalidArgument("dx must be positive");
  if (dx_request >= length) throw InvalidArgument("dx must be smaller than the domain length");
  // The relative slack keeps 8/0.1 from rounding up to 81 cells.
  const double ratio = length / dx_request;
  const double cells = std::ceil(ratio * (1.0 - 1e-12));
  if (cells > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw InvalidArgument("too many cells");
  }
  const auto n = static_cast<std::size_t>(cells);
  return Torus{length, length / static_cast<double>(n), n};
}

std::ptrdiff_t Lattice::observation_index(double t) const noexcept {
  for (std::size_t i = 0; i < observation_times_.size(); ++i) {
    if (std::abs(observation_times_[i] - t) <= 0.5 * dt_) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

Lattice build_lattice(double length, double dx_request, double t_max,
                      std::vector<double> observation_times, const LatticeOptions& options) {
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  if (observation_times.empty()) throw InvalidArgument("at least one observation time required");
  if (!(options.dt_fraction > 0.0) || options.dt_fraction > 0.5) {
    throw InvalidArgument("dt_fraction must lie in (0, 1/2]");
  }
  std::sort(observation_times.begin(), observation_times.end());
  observation_times.erase(std::unique(observation_times.begin(), observation_times.end()),
                          observation_times.end());
  if (!(observation_times.front() > 0.0) || observation_times.back() > t_max) {
    throw InvalidArgument("observation times must lie in (0, t_max]");
  }

  Lattice lattice;
  lattice.space_ = build_torus(length, dx_request);
  const double dx = lattice.space_.dx;
  lattice.dt_ = options.dt_fraction * dx * dx;
  lattice.t_max_ = t_max;

  const double horizon_steps = std::ceil(t_max / lattice.dt_ * (1.0 - 1e-12));
  if (horizon_steps > static_cast<double>(options.max_steps)) {
    std::ostringstream msg;
    msg << "horizon t_max=" << t_max << " needs " << horizon_steps
        << " steps, above the budget of " << options.max_steps;
    throw InvalidArgument(msg.str());
  }
  std::uint64_t steps = static_cast<std::uint64_t>(horizon_steps);

  for (double t : observation_times) {
    auto k = static_cast<std::uint64_t>(std::llround(t / lattice.dt_));
    k = std::max<std::uint64_t>(k, 1);
    if (!lattice.observation_steps_.empty() && k == lattice.observation_steps_.back()) continue;
    lattice.observation_steps_.push_back(k);
    const double snapped = static_cast<double>(k) * lattice.dt_;
    lattice.observation_times_.push_back(snapped);
    lattice.snap_distances_.push_back(std::abs(snapped - t));
    steps = std::max(steps, k);
  }
  lattice.steps_ = steps;
  return lattice;
}

SeedPlan::SeedPlan(std::uint64_t master_seed, std::uint32_t replica_count)
    : master_seed_(master_seed), replica_count_(replica_count) {
  if (replica_count == 0) throw InvalidArgument("replica_count must be positive");
}

NoiseStream SeedPlan::stream(std::uint32_t replica) const {
  if (replica >= replica_count_) throw InvalidArgument("replica index out of range");
  return NoiseStream{master_seed_, replica};
}

void white_noise_block(const Lattice& lattice, const NoiseStream& stream,
                       std::uint64_t step_index, std::span<double> out) {
  const std::size_t n = lattice.cells();
  if (out.size() != n) throw InvalidArgument("noise buffer size does not match the lattice");
  if (step_index > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("step index exceeds the 32-bit counter word");
  }
  const PhiloxKey key = key_from_seed(stream.master_seed);
  const auto step = static_cast<std::uint32_t>(step_index);
  const auto domain = static_cast<std::uint32_t>(StreamDomain::kFieldNoise);
  std::size_t j = 0;
  for (std::uint32_t pair = 0; j < n; ++pair) {
    const auto [z0, z1] = box_muller(philox4x32_10({pair, step, stream.replica, domain}, key));
    out[j++] = z0;
    if (j < n) out[j++] = z1;
  }
}

std::vector<double> white_noise_block(const Lattice& lattice, const NoiseStream& stream,
                                      std::uint64_t step_index) {
  std::vector<double> out(lattice.cells());
  white_noise_block(lattice, stream, step_index, out);
  return out;
}

}  // namespace sbm
