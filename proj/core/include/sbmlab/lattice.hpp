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
#include <span>
#include <vector>

namespace sbm {

// Periodic spatial grid [0, length) split into `cells` cells of width dx.
// Cell j covers [j*dx, (j+1)*dx); its node is the left endpoint.
struct Torus {
  double length = 0.0;
  double dx = 0.0;
  std::size_t cells = 0;

  double node(std::size_t j) const noexcept { return static_cast<double>(j) * dx; }
  // Index of the cell containing x after wrapping onto [0, length).
  std::size_t cell_of(double x) const noexcept;
  double wrap(double x) const noexcept;
  // Same spatial grid stretched by `factor` (dx and length both scaled).
  Torus scaled(double factor) const noexcept;
  bool same_grid(const Torus& other) const noexcept;
};

// Builds a torus with cells = ceil(length / dx_request); dx is then
// length / cells so the cells tile the period exactly.
Torus build_torus(double length, double dx_request);

struct LatticeOptions {
  // dt = dt_fraction * dx^2; must not exceed the explicit-scheme bound 1/2.
  double dt_fraction = 0.25;
  std::uint64_t max_steps = 20'000'000;
};

class Lattice {
 public:
  const Torus& space() const noexcept { return space_; }
  double dx() const noexcept { return space_.dx; }
  double length() const noexcept { return space_.length; }
  std::size_t cells() const noexcept { return space_.cells; }
  double dt() const noexcept { return dt_; }
  double t_max() const noexcept { return t_max_; }
  // Time steps needed to reach the horizon (and every observation time).
  std::uint64_t steps() const noexcept { return steps_; }

  // Sorted, snapped to multiples of dt.
  const std::vector<double>& observation_times() const noexcept { return observation_times_; }
  const std::vector<std::uint64_t>& observation_steps() const noexcept {
    return observation_steps_;
  }
  // |requested - snapped| for each observation time, in request order
  // after sorting.
  const std::vector<double>& snap_distances() const noexcept { return snap_distances_; }

  // Index of the observation time closest to t, or -1 if none lies within dt/2.
  std::ptrdiff_t observation_index(double t) const noexcept;

 private:
  friend Lattice build_lattice(double, double, double, std::vector<double>,
                               const LatticeOptions&);
  Lattice() = default;

  Torus space_;
  double dt_ = 0.0;
  double t_max_ = 0.0;
  std::uint64_t steps_ = 0;
  std::vector<double> observation_times_;
  std::vector<std::uint64_t> observation_steps_;
  std::vector<double> snap_distances_;
};

Lattice build_lattice(double length, double dx_request, double t_max,
                      std::vector<double> observation_times, const LatticeOptions& options = {});

// Domain tags keep the random streams of different consumers disjoint.
enum class StreamDomain : std::uint32_t {
  kFieldNoise = 0,
  kParticles = 1,
  kSynthetic = 2,
  kFunctions = 3,
};

struct NoiseStream {
  std::uint64_t master_seed = 0;
  std::uint32_t replica = 0;
};

class SeedPlan {
 public:
  SeedPlan(std::uint64_t master_seed, std::uint32_t replica_count);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint32_t replica_count() const noexcept { return replica_count_; }
  NoiseStream stream(std::uint32_t replica) const;

 private:
  std::uint64_t master_seed_;
  std::uint32_t replica_count_;
};

// Fills `out` (one entry per cell) with the i.i.d. standard normals of time
// step `step_index`. Deterministic in (stream, step_index, cell).
void white_noise_block(const Lattice& lattice, const NoiseStream& stream,
                       std::uint64_t step_index, std::span<double> out);
std::vector<double> white_noise_block(const Lattice& lattice, const NoiseStream& stream,
                                      std::uint64_t step_index);

}  // namespace sbm
