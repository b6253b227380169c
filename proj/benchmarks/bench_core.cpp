// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "pvbs/error.hpp"
#include "pvbs/martingale.hpp"
#include "pvbs/operator.hpp"
#include "pvbs/spectra.hpp"
#include "pvbs/variational.hpp"

namespace {

using namespace pvbs;

void BM_AssembleSector(benchmark::State& state) {
  const auto p = ModelParams::make({2.0, 0.5}, {1.0, 0.0});
  const Coord side = state.range(0);
  const Region r = build_region(RegionSpec::box({0, 0}, {side, side}));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_sector(r, p, 3));
}
BENCHMARK(BM_AssembleSector)->Arg(4)->Arg(5)->Arg(6);

void BM_SectorSpectrum(benchmark::State& state) {
  const auto p = ModelParams::make({1.6, 0.7}, {1.0, 0.0});
  const auto op = assemble_sector(build_region(RegionSpec::box({0, 0}, {5, 5})), p, 3);
  SolverCaps caps;
  caps.dense_threshold = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sector_spectrum(op, caps));
}
BENCHMARK(BM_SectorSpectrum)->Arg(100)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_EpsilonExact(benchmark::State& state) {
  const auto p = ModelParams::make({2.0, 0.5}, {1.0, 0.0});
  const auto f = build_filtration(RegionSpec::box({0, 0}, {20, 20}), p, Sweep::axis(1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_exact(f, 10, 4, p));
}
BENCHMARK(BM_EpsilonExact);

void BM_EpsilonBruteforce(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto inst = random_lemma_instance(rng);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(epsilon_bruteforce(inst.filtration, inst.n, inst.ell, inst.params));
    } catch (const Error&) {
    }
  }
}
BENCHMARK(BM_EpsilonBruteforce)->Unit(benchmark::kMillisecond);

void BM_TrialState(benchmark::State& state) {
  const auto p = ModelParams::make_normalized({std::exp(-1.0), std::exp(-1.0)}, {1.0, 1.0});
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trial_state_energy(p, L));
}
BENCHMARK(BM_TrialState)->Arg(16)->Arg(256)->Arg(1000);

void BM_CertifyCase1b(benchmark::State& state) {
  const auto p = ModelParams::make({2.0, 1.0}, {0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(certify_lower_bound(p, 2));
}
BENCHMARK(BM_CertifyCase1b)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
