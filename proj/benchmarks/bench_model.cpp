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

#include "socrec/model.hpp"
#include "socrec/synth.hpp"
#include "socrec/training.hpp"

namespace
{

socrec::data::Scene scene_with(std::size_t agents)
{
  socrec::data::SynthConfig c;
  c.n_scenes = 1;
  c.agents_min = agents;
  c.agents_max = agents;
  return socrec::data::generate_synthetic_dataset(c, 3).front();
}

socrec::training::TrainConfig desk_config()
{
  socrec::training::TrainConfig c;
  c.hyper.d_model = 32;
  c.hyper.d_ff = 64;
  c.hyper.heads = 4;
  c.hyper.d_latent = 16;
  return c;
}

// One forward/backward pass of the joint objective; arg is the agent count.
void BM_SceneStep(benchmark::State & state)
{
  const auto config = desk_config();
  const socrec::model::Model model(config.hyper, 1);
  const auto scene = scene_with(static_cast<std::size_t>(state.range(0)));
  int epoch = 0;
  for (auto _ : state) {
    auto step = socrec::training::scene_step(model, config, scene, 0, ++epoch);
    benchmark::DoNotOptimize(step.losses.total);
  }
}
BENCHMARK(BM_SceneStep)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

// Autoregressive decoding of K samples.
void BM_SamplePredictions(benchmark::State & state)
{
  const auto config = desk_config();
  const socrec::model::Model model(config.hyper, 1);
  const auto scene = scene_with(4);
  socrec::Rng rng(5);
  for (auto _ : state) {
    auto preds = model.sample_predictions(scene, static_cast<std::size_t>(state.range(0)), rng);
    benchmark::DoNotOptimize(preds.points.data());
  }
}
BENCHMARK(BM_SamplePredictions)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
