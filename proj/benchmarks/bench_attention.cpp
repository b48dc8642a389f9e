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

#include "socrec/nn/attention.hpp"
#include "socrec/random.hpp"

namespace
{

using socrec::nn::Tensor;
using socrec::nn::Var;
using Graph = socrec::nn::Graph<float>;

Tensor<float> random_tensor(std::size_t rows, std::size_t cols, socrec::Rng & rng)
{
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Tensor<float> t(rows, cols);
  for (auto & v : t.values()) v = u(rng);
  return t;
}

// Args: agents, sequence length. d_model 64 with 4 heads.
void BM_AgentAwareAttention(benchmark::State & state)
{
  const auto agents = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  constexpr std::size_t d = 64;
  socrec::Rng rng(1);
  const auto x = random_tensor(agents * steps, d, rng);
  std::vector<Tensor<float>> w;
  for (int i = 0; i < 5; ++i) w.push_back(random_tensor(d, d, rng));
  const auto mask = socrec::nn::build_agent_mask(agents, steps);
  for (auto _ : state) {
    Graph g;
    socrec::nn::AttentionProjections<float> p{
      g.constant(w[0]), g.constant(w[1]), g.constant(w[2]), g.constant(w[3]), g.constant(w[4])};
    const Var<float> in = g.input(x);
    const Var<float> out = socrec::nn::agent_aware_attention(in, in, in, mask, p, 4);
    g.backward(socrec::nn::sum(out));
    benchmark::DoNotOptimize(g.grad(in).values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(agents * steps));
}
BENCHMARK(BM_AgentAwareAttention)->Args({2, 8})->Args({4, 8})->Args({4, 20})->Args({8, 20});

}  // namespace

BENCHMARK_MAIN();
