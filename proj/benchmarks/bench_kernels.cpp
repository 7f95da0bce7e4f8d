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

#include <benchmark/benchmark.h>

#include <vector>

#include "sbmlab/clt.hpp"
#include "sbmlab/duhamel.hpp"
#include "sbmlab/heat.hpp"
#include "sbmlab/philox.hpp"
#include "sbmlab/sim.hpp"

namespace {

void BM_Philox(benchmark::State& state) {
  sbm::PhiloxCounter c{0, 0, 0, 0};
  const sbm::PhiloxKey k{0x1234u, 0x5678u};
  for (auto _ : state) {
    c = sbm::philox4x32_10(c, k);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_Philox);

void BM_NoiseBlock(benchmark::State& state) {
  const auto lat = sbm::build_lattice(static_cast<double>(state.range(0)) * 0.05, 0.05, 1.0, {1.0});
  std::vector<double> out(lat.cells());
  std::uint64_t step = 0;
  for (auto _ : state) {
    sbm::white_noise_block(lat, {1, 0}, step++ % lat.steps(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NoiseBlock)->Arg(280)->Arg(2800);

// One full FD replica per iteration; items = cell updates.
void BM_FdReplica(benchmark::State& state) {
  const auto lat = sbm::build_lattice(static_cast<double>(state.range(0)) * 0.05, 0.05, 0.25, {0.25});
  std::uint32_t r = 0;
  for (auto _ : state) {
    auto path = sbm::simulate_fd(lat, {1, r++});
    benchmark::DoNotOptimize(path.field(0).data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lat.steps() * lat.cells()));
}
BENCHMARK(BM_FdReplica)->Arg(280)->Arg(2800)->Unit(benchmark::kMillisecond);

void BM_ParticleReplica(benchmark::State& state) {
  const auto lat = sbm::build_lattice(14.0, 0.05, 1.0, {1.0});
  std::uint32_t r = 0;
  for (auto _ : state) {
    auto snaps = sbm::simulate_particles(static_cast<double>(state.range(0)), lat, 1.0, {1, r++});
    benchmark::DoNotOptimize(snaps.back().positions.data());
  }
}
BENCHMARK(BM_ParticleReplica)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Semigroup(benchmark::State& state) {
  const auto space = sbm::build_torus(static_cast<double>(state.range(0)) * 0.05, 0.05);
  const auto f = sbm::SampledFunction::indicator(space, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sbm::apply_semigroup(f, 0.3));
}
BENCHMARK(BM_Semigroup)->Arg(280)->Arg(2800)->Arg(16384);

// Log-Laplace solve to t = 1; items = time steps.
void BM_SolveLogLaplace(benchmark::State& state) {
  const auto space = sbm::build_torus(static_cast<double>(state.range(0)) * 0.05, 0.05);
  const auto f = sbm::SampledFunction::indicator(space, 0.0, 1.0);
  std::size_t steps = 0;
  for (auto _ : state) {
    const auto sol = sbm::solve_log_laplace(f, 1.0);
    steps = sol.diagnostics().steps;
    benchmark::DoNotOptimize(sol.final().mass());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_SolveLogLaplace)->Arg(280)->Arg(2800)->Unit(benchmark::kMillisecond);

void BM_PlancherelPair(benchmark::State& state) {
  const auto space = sbm::build_torus(16.0, 1e-4);
  const auto f = sbm::SampledFunction::indicator(space, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sbm::plancherel_pair_integral(f, f, 1.0, 0.0, 0.0, 100.0));
}
BENCHMARK(BM_PlancherelPair)->Unit(benchmark::kMillisecond);

void BM_ExcessMass(benchmark::State& state) {
  const auto space = sbm::build_torus(140.0, 0.05);
  std::vector<double> u(space.cells, 1.0);
  for (std::size_t j = 0; j < u.size(); ++j) u[j] += 0.1 * static_cast<double>(j % 7);
  for (auto _ : state) benchmark::DoNotOptimize(sbm::excess_mass(u, space, 3.33, 97.1));
}
BENCHMARK(BM_ExcessMass);

}  // namespace

BENCHMARK_MAIN();
