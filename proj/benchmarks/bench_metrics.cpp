// Copyright 2026 The socrec Authors
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

#include <random>

#include "socrec/metrics.hpp"
#include "socrec/random.hpp"

namespace
{

socrec::PredictionSet random_set(std::size_t k, std::size_t n, socrec::Rng & rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  socrec::PredictionSet p(k, n);
  for (auto & v : p.points) v = {g(rng), g(rng)};
  return p;
}

void BM_Displacement(benchmark::State & state)
{
  socrec::Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto gt = random_set(1, n, rng), preds = random_set(20, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(socrec::metrics::ade(preds, gt, socrec::metrics::Reduction::min));
    benchmark::DoNotOptimize(socrec::metrics::fde(preds, gt, socrec::metrics::Reduction::mean));
  }
}
BENCHMARK(BM_Displacement)->Arg(4)->Arg(16);

void BM_KdeNll(benchmark::State & state)
{
  socrec::Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto gt = random_set(1, n, rng), preds = random_set(20, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(socrec::metrics::kde_nll(preds, gt));
}
BENCHMARK(BM_KdeNll)->Arg(4)->Arg(16);

void BM_Overlap(benchmark::State & state)
{
  socrec::Rng rng(3);
  const auto preds = random_set(20, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(socrec::metrics::overlap_stats(preds, 0.1).count);
}
BENCHMARK(BM_Overlap)->Arg(4)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
