// Copyright 2026 The abstain-metrology Authors
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

// Serial reference versus OpenMP kernels. Arg(0) is serial, Arg(1) parallel.
#include <benchmark/benchmark.h>

#include "abstain/oracle.hpp"
#include "abstain/probes.hpp"
#include "abstain/simulate.hpp"
#include "abstain/tradeoff.hpp"

using namespace abstain;

namespace {

Exec exec_of(const benchmark::State &state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_BuildBlocks(benchmark::State &state) {
  const auto probe = probes::multicopy(static_cast<int>(state.range(1)));
  const NoiseModel nz(0.9);
  for (auto _ : state) benchmark::DoNotOptimize(build_blocks(probe, nz, exec_of(state)));
}
BENCHMARK(BM_BuildBlocks)->ArgsProduct({{0, 1}, {200, 1000}})->Unit(benchmark::kMillisecond);

void BM_Allocate(benchmark::State &state) {
  const int n = static_cast<int>(state.range(1));
  const NoiseModel nz(0.8);
  const auto blocks = build_blocks(probes::multicopy(n), nz);
  const auto hams = coupling_matrices(n, nz);
  for (auto _ : state) benchmark::DoNotOptimize(allocate(blocks, hams, 0.5, exec_of(state)));
}
BENCHMARK(BM_Allocate)->ArgsProduct({{0, 1}, {100, 400}})->Unit(benchmark::kMillisecond);

void BM_TradeoffCurve(benchmark::State &state) {
  std::vector<double> grid;
  for (int k = 1; k <= 32; ++k) grid.push_back(k / 32.0);
  const auto probe = probes::multicopy(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(tradeoff_curve(probe, NoiseModel(0.8), grid, "m", exec_of(state)));
}
BENCHMARK(BM_TradeoffCurve)->ArgsProduct({{0, 1}, {50, 200}})->Unit(benchmark::kMillisecond);

void BM_DenseDephase(benchmark::State &state) {
  const int n = static_cast<int>(state.range(1));
  const oracle::Vector psi = oracle::symmetric_state(probes::multicopy(n));
  const oracle::Matrix rho = psi * psi.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(oracle::dense_dephase(rho, NoiseModel(0.8), exec_of(state)));
}
BENCHMARK(BM_DenseDephase)->ArgsProduct({{0, 1}, {8, 11}})->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State &state) {
  const NoiseModel nz(0.8);
  const auto blocks = build_blocks(probes::multicopy(6), nz);
  const auto pt = allocate(blocks, coupling_matrices(6, nz), 0.6);
  const simulate::Simulator sim(blocks, pt.solutions);
  for (auto _ : state) benchmark::DoNotOptimize(sim.run(static_cast<std::uint64_t>(state.range(1)), 1, exec_of(state)));
}
BENCHMARK(BM_MonteCarlo)->ArgsProduct({{0, 1}, {1 << 18}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
