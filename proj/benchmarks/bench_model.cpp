// Copyright 2026 The qrepeater Authors
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

#include <cmath>

#include "qrepeater/model.hpp"
#include "qrepeater/montecarlo.hpp"
#include "qrepeater/planner.hpp"

namespace {

// The first argument is the decade: p = 10^-range(0).
double probability(const benchmark::State& state) {
  return std::pow(10.0, -static_cast<double>(state.range(0)));
}

void BM_SurvivalSeries(benchmark::State& state) {
  const double p = probability(state);
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::expected_max_attempts_series(p, n));
  }
}
// Below p = 1e-3 the series exceeds its term budget and refuses to run.
BENCHMARK(BM_SurvivalSeries)->ArgsProduct({{1, 2, 3}, {2, 16, 128}});

void BM_MomentRecursion(benchmark::State& state) {
  const double p = probability(state);
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::max_geometric_moments(p, n));
  }
}
BENCHMARK(BM_MomentRecursion)->ArgsProduct({{1, 3, 6, 12}, {2, 16, 128}});

void BM_Metrics(benchmark::State& state) {
  const qrep::ChainConfig chain(static_cast<double>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::metrics(qrep::HardwareParams{}, chain, qrep::ChannelParams{}));
  }
}
BENCHMARK(BM_Metrics)->Args({1600, 8})->Args({1600, 13})->Args({500, 4});

void BM_OptimizeLinkCount(benchmark::State& state) {
  const double length = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::optimize_link_count(qrep::HardwareParams{}, length, qrep::ChannelParams{},
                                                       qrep::default_max_links(length)));
  }
}
BENCHMARK(BM_OptimizeLinkCount)->Arg(500)->Arg(1600)->Arg(3200)->Unit(benchmark::kMillisecond);

void BM_Crossover(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::crossover_with_direct(qrep::HardwareParams{}, qrep::ChannelParams{}));
  }
}
BENCHMARK(BM_Crossover)->Unit(benchmark::kMillisecond);

void BM_SampleChainRound(benchmark::State& state) {
  qrep::Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::sample_chain_round(0.0986, n, rng));
  }
}
BENCHMARK(BM_SampleChainRound)->Arg(1)->Arg(8)->Arg(16);

void BM_Simulate(benchmark::State& state) {
  qrep::TrialConfig cfg;
  cfg.chain = qrep::ChainConfig(static_cast<double>(state.range(0)), static_cast<int>(state.range(1)));
  cfg.trials = 1000;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrep::simulate(cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.trials));
}
BENCHMARK(BM_Simulate)->Args({500, 4})->Args({1000, 8})->Args({1000, 16})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
