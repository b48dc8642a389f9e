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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "socrec/synth.hpp"

namespace socrec::data
{
namespace
{

double min_pair_distance(const Scene & s)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.agents(); ++i) {
    for (std::size_t j = i + 1; j < s.agents(); ++j) {
      for (std::size_t t = 0; t < Scene::kTotalSteps; ++t) best = std::min(best, std::sqrt(squared_distance(s.at(i, t), s.at(j, t))));
    }
  }
  return best;
}

TEST(Synth, SameSeedIsBitIdentical)
{
  SynthConfig cfg;
  cfg.n_scenes = 20;
  cfg.heading_noise = 0.3;
  const auto a = generate_synthetic_dataset(cfg, 42);
  const auto b = generate_synthetic_dataset(cfg, 42);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t s = 0; s < a.size(); ++s) {
    EXPECT_EQ(a[s].ped_ids, b[s].ped_ids);
    EXPECT_EQ(a[s].positions, b[s].positions);
  }
  const auto c = generate_synthetic_dataset(cfg, 43);
  EXPECT_NE(a[0].positions, c[0].positions);
}

TEST(Synth, ScenesRespectConfiguredRanges)
{
  SynthConfig cfg;
  cfg.n_scenes = 50;
  cfg.agents_min = 2;
  cfg.agents_max = 5;
  std::int64_t next = 0;
  for (const auto & s : generate_synthetic_dataset(cfg, 1)) {
    EXPECT_GE(s.agents(), 2u);
    EXPECT_LE(s.agents(), 5u);
    for (auto id : s.ped_ids) EXPECT_EQ(id, next++);
    EXPECT_NO_THROW(s.validate());
  }
}

TEST(Synth, ForceFreeSingleAgentMovesInAStraightLine)
{
  SynthConfig cfg;
  cfg.n_scenes = 10;
  cfg.agents_min = cfg.agents_max = 1;
  cfg.interaction_strength = 0.0;
  cfg.heading_noise = 0.0;
  for (const auto & s : generate_synthetic_dataset(cfg, 5)) {
    const Vec2 step = s.at(0, 1) - s.at(0, 0);
    for (std::size_t t = 1; t < Scene::kTotalSteps; ++t) {
      const Vec2 d = s.at(0, t) - s.at(0, t - 1);
      EXPECT_NEAR(d.x, step.x, 1e-12);
      EXPECT_NEAR(d.y, step.y, 1e-12);
    }
  }
}

TEST(Synth, RepulsionWidensHeadOnPass)
{
  std::vector<SimAgent> agents(2);
  // Without forces both reach x = 0 together after 10 steps, 0.2 m apart.
  agents[0] = {{-4.8, 0.1}, {1.2, 0.0}, {96.0, 0.1}, 1.2};
  agents[1] = {{4.8, -0.1}, {-1.2, 0.0}, {-96.0, -0.1}, 1.2};
  SynthConfig free;
  free.interaction_strength = 0.0;
  SynthConfig pushy;
  pushy.interaction_strength = 0.5;
  const double d_free = min_pair_distance(simulate_scene(agents, free));
  const double d_push = min_pair_distance(simulate_scene(agents, pushy));
  EXPECT_NEAR(d_free, 0.2, 1e-9);
  EXPECT_GT(d_push, d_free);
}

TEST(Synth, RepulsionWidensPassesAcrossSeeds)
{
  SynthConfig cfg;
  cfg.n_scenes = 40;
  cfg.agents_min = cfg.agents_max = 2;
  SynthConfig free = cfg;
  free.interaction_strength = 0.0;
  const auto a = generate_synthetic_dataset(cfg, 7);
  const auto b = generate_synthetic_dataset(free, 7);
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    sum_a += min_pair_distance(a[s]);
    sum_b += min_pair_distance(b[s]);
  }
  EXPECT_GT(sum_a, sum_b);
}

TEST(Synth, ValidateRejectsBadConfigs)
{
  SynthConfig cfg;
  cfg.agents_min = 3;
  cfg.agents_max = 2;
  EXPECT_THROW(generate_synthetic_dataset(cfg, 1), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.speed_min = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.n_scenes = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(simulate_scene({}, SynthConfig{}), std::invalid_argument);
}

}  // namespace
}  // namespace socrec::data
