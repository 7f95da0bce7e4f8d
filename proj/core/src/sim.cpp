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

#include "sbmlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbmlab/error.hpp"
#include "sbmlab/philox.hpp"

namespace sbm {

DensityPath::DensityPath(Lattice lattice, std::vector<std::vector<double>> fields,
                         std::string backend, std::uint32_t replica, std::uint64_t seed,
                         std::uint64_t clamp_events, std::uint64_t cell_updates)
    : lattice_(std::move(lattice)),
      fields_(std::move(fields)),
      backend_(std::move(backend)),
      replica_(replica),
      seed_(seed),
      clamp_events_(clamp_events),
      cell_updates_(cell_updates) {
  if (fields_.size() != lattice_.observation_times().size()) {
    throw InvalidArgument("density path needs one field per observation time");
  }
  for (const auto& f : fields_) {
    if (f.size() != lattice_.cells()) throw InvalidArgument("density field size mismatch");
  }
}

DensityPath simulate_fd(const Lattice& lattice, const NoiseStream& stream,
                        const FdOptions& options) {
  const double dx = lattice.dx();
  const double dt = lattice.dt();
  if (dt > 0.5 * dx * dx * (1.0 + 1e-12)) throw InvalidArgument("lattice violates dt <= dx^2/2");
  const std::size_t n = lattice.cells();
  if (n < 3) throw InvalidArgument("finite-difference scheme needs at least 3 cells");

  const double diffusion = dt / (2.0 * dx * dx);
  const double noise_scale = std::sqrt(dt / dx);
  const auto& obs_steps = lattice.observation_steps();
  const std::uint64_t last_step = obs_steps.back();

  std::vector<double> u(n, 1.0), next(n), xi(n, 0.0);
  std::vector<std::vector<double>> fields;
  fields.reserve(obs_steps.size());
  std::uint64_t clamps = 0;
  std::size_t obs = 0;

  for (std::uint64_t step = 0; step < last_step; ++step) {
    if (!options.zero_noise) white_noise_block(lattice, stream, step, xi);
    for (std::size_t j = 0; j < n; ++j) {
      const double left = u[j == 0 ? n - 1 : j - 1];
      const double right = u[j + 1 == n ? 0 : j + 1];
      const double here = u[j];
      double v = here + diffusion * (right - 2.0 * here + left) +
                 std::sqrt(std::max(here, 0.0)) * noise_scale * xi[j];
      if (v < 0.0) {
        v = 0.0;
        ++clamps;
      } else if (!(v <= std::numeric_limits<double>::max())) {
        std::ostringstream msg;
        msg << "non-finite density in replica " << stream.replica << " at step " << step + 1
            << ", cell " << j;
        throw NumericalError(msg.str());
      }
      next[j] = v;
    }
    u.swap(next);
    while (obs < obs_steps.size() && obs_steps[obs] == step + 1) {
      fields.push_back(u);
      ++obs;
    }
  }
  return DensityPath(lattice, std::move(fields), "fd", stream.replica, stream.master_seed, clamps,
                     last_step * n);
}

std::vector<ParticleEnsemble> simulate_particles(double mass_resolution, const Lattice& lattice,
                                                 double t_max, const NoiseStream& stream,
                                                 const ParticleOptions& options) {
  if (!(mass_resolution >= 1.0)) throw InvalidArgument("mass resolution M must be >= 1");
  const Torus& space = lattice.space();
  std::vector<double> obs_times;
  for (double t : lattice.observation_times()) {
    if (t <= t_max * (1.0 + 1e-12)) obs_times.push_back(t);
  }
  if (obs_times.empty()) throw InvalidArgument("no observation time within t_max");
  const double t_end = obs_times.back();
  const double rate = mass_resolution;

  std::vector<ParticleEnsemble> snapshots(obs_times.size());
  for (std::size_t i = 0; i < obs_times.size(); ++i) {
    snapshots[i].time = obs_times[i];
    snapshots[i].mass_unit = 1.0 / mass_resolution;
    snapshots[i].replica = stream.replica;
  }

  CounterEngine rng(stream.master_seed, stream.replica,
                    static_cast<std::uint32_t>(StreamDomain::kParticles));

  struct Lineage {
    double birth;
    double position;
  };
  std::vector<Lineage> pending;
  // Poisson process of intensity M on [0, L): exponential gaps of mean 1/M.
  for (double x = rng.exponential(rate); x < space.length; x += rng.exponential(rate)) {
    pending.push_back({0.0, x});
  }
  // Depth-first over the family trees; the order of draws is fixed, so the
  // replica is a deterministic function of its stream.
  std::reverse(pending.begin(), pending.end());

  auto overflow = [&](const char* what) {
    std::ostringstream msg;
    msg << "particle population explosion in replica " << stream.replica << ": " << what
        << " exceeded the cap of " << options.population_cap;
    throw NumericalError(msg.str());
  };

  while (!pending.empty()) {
    Lineage p = pending.back();
    pending.pop_back();
    double now = p.birth;
    double x = p.position;
    const double death = now + rng.exponential(rate);
    auto next_obs = static_cast<std::size_t>(
        std::upper_bound(obs_times.begin(), obs_times.end(), now) - obs_times.begin());
    while (next_obs < obs_times.size() && obs_times[next_obs] <= death) {
      x += std::sqrt(obs_times[next_obs] - now) * rng.normal();
      now = obs_times[next_obs];
      auto& snap = snapshots[next_obs].positions;
      snap.push_back(space.wrap(x));
      if (snap.size() > options.population_cap) overflow("snapshot size");
      ++next_obs;
    }
    if (death < t_end) {
      x += std::sqrt(death - now) * rng.normal();
      if (rng.coin()) {
        const double pos = space.wrap(x);
        pending.push_back({death, pos});
        pending.push_back({death, pos});
        if (pending.size() > options.population_cap) overflow("pending lineages");
      }
    }
  }
  return snapshots;
}

std::vector<double> density_histogram(const ParticleEnsemble& ensemble, const Torus& space) {
  std::vector<double> density(space.cells, 0.0);
  const double weight = ensemble.mass_unit / space.dx;
  for (double x : ensemble.positions) density[space.cell_of(x)] += weight;
  return density;
}

double functional(const DensityPath& path, std::size_t time_index, const SampledFunction& f) {
  if (!f.space().same_grid(path.lattice().space())) {
    throw InvalidArgument("test function and density live on different grids");
  }
  const auto u = path.field(time_index);
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += f[j] * u[j];
  return s * f.space().dx;
}

double functional(const ParticleEnsemble& ensemble, const SampledFunction& f) {
  double s = 0.0;
  for (double x : ensemble.positions) s += f.at(x);
  return s * ensemble.mass_unit;
}

double second_moment_target(const SampledFunction& f, double t) {
  if (!f.admissible()) throw InvalidArgument("second moment target needs an admissible f");
  const double mean = f.mass();
  if (t == 0.0) return mean * mean;
  return mean * mean + plancherel_pair_integral(f, f, t, 0.0, 0.0, 1.0);
}

}  // namespace sbm
