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
#include <string>
#include <vector>

#include "sbmlab/heat.hpp"
#include "sbmlab/lattice.hpp"

namespace sbm {

// Density u(t, .) of one replica at the lattice observation times.
class DensityPath {
 public:
  const Lattice& lattice() const noexcept { return lattice_; }
  const std::vector<double>& times() const noexcept { return lattice_.observation_times(); }
  std::span<const double> field(std::size_t time_index) const { return fields_.at(time_index); }
  std::size_t time_count() const noexcept { return fields_.size(); }
  const std::string& backend() const noexcept { return backend_; }
  std::uint32_t replica() const noexcept { return replica_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t clamp_events() const noexcept { return clamp_events_; }
  std::uint64_t cell_updates() const noexcept { return cell_updates_; }
  double clamp_fraction() const noexcept {
    return cell_updates_ == 0 ? 0.0
                              : static_cast<double>(clamp_events_) / static_cast<double>(cell_updates_);
  }

  DensityPath(Lattice lattice, std::vector<std::vector<double>> fields, std::string backend,
              std::uint32_t replica, std::uint64_t seed, std::uint64_t clamp_events = 0,
              std::uint64_t cell_updates = 0);

 private:
  Lattice lattice_;
  std::vector<std::vector<double>> fields_;
  std::string backend_;
  std::uint32_t replica_;
  std::uint64_t seed_;
  std::uint64_t clamp_events_;
  std::uint64_t cell_updates_;
};

struct FdOptions {
  // Replace the noise by zeros (deterministic heat flow of the flat start).
  bool zero_noise = false;
};

// Explicit scheme for du = u''/2 dt + sqrt(u) dW from u(0, .) = 1:
//   u_{n+1,j} = u_{n,j} + dt/(2dx^2) (u_{n,j+1} - 2u_{n,j} + u_{n,j-1})
//               + sqrt(max(u_{n,j}, 0)) sqrt(dt/dx) xi_{n,j},
// clamped at 0 after each step. Throws NumericalError on a non-finite value.
DensityPath simulate_fd(const Lattice& lattice, const NoiseStream& stream,
                        const FdOptions& options = {});

// Positions of a critical binary branching Brownian motion, each particle
// carrying mass mass_unit = 1/M.
struct ParticleEnsemble {
  double time = 0.0;
  double mass_unit = 0.0;
  std::vector<double> positions;
  std::uint32_t replica = 0;

  double total_mass() const noexcept { return mass_unit * static_cast<double>(positions.size()); }
};

struct ParticleOptions {
  // Abort when a snapshot or the pending-lineage stack exceeds this size.
  std::size_t population_cap = 10'000'000;
};

// Poisson(M per unit length) initial particles of mass 1/M on the lattice
// torus; each performs Brownian motion with variance t, lives an Exp(M)
// time and then leaves 0 or 2 offspring with probability 1/2 each.
// Returns one snapshot per lattice observation time <= t_max.
std::vector<ParticleEnsemble> simulate_particles(double mass_resolution, const Lattice& lattice,
                                                 double t_max, const NoiseStream& stream,
                                                 const ParticleOptions& options = {});

// Cell histogram of the particle mass turned into a density (mass / dx).
std::vector<double> density_histogram(const ParticleEnsemble& ensemble, const Torus& space);

// <X_t, f>: sum_j f_j u_j dx for a density, (1/M) sum f(position) for particles.
double functional(const DensityPath& path, std::size_t time_index, const SampledFunction& f);
double functional(const ParticleEnsemble& ensemble, const SampledFunction& f);

// E<X_t, f>^2 = <lambda, f>^2 + int_0^t <lambda, (P_s f)^2> ds.
double second_moment_target(const SampledFunction& f, double t);

}  // namespace sbm
