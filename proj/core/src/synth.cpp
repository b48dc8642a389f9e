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

#include "socrec/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace socrec::data
{

void SynthConfig::validate() const
{
  if (n_scenes == 0) throw std::invalid_argument("synth: n_scenes must be positive");
  if (agents_min == 0 || agents_min > agents_max) {
    throw std::invalid_argument("synth: need 1 <= agents_min <= agents_max");
  }
  if (!(speed_min > 0.0) || speed_min > speed_max) {
    throw std::invalid_argument("synth: need 0 < speed_min <= speed_max");
  }
  if (interaction_strength < 0.0) throw std::invalid_argument("synth: interaction_strength must be >= 0");
  if (heading_noise < 0.0) throw std::invalid_argument("synth: heading_noise must be >= 0");
  if (!(arena_radius > 0.0)) throw std::invalid_argument("synth: arena_radius must be positive");
  if (!(relaxation_time > 0.0) || !(time_step > 0.0) || !(max_repulsion > 0.0)) {
    throw std::invalid_argument("synth: relaxation_time, time_step, max_repulsion must be positive");
  }
}

Scene simulate_scene(const std::vector<SimAgent> & agents, const SynthConfig & config)
{
  if (agents.empty()) throw std::invalid_argument("simulate_scene: no agents");
  const std::size_t n = agents.size();
  const double dt = config.time_step;
  std::vector<Vec2> pos(n), vel(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = agents[i].position;
    vel[i] = agents[i].velocity;
  }

  Scene scene;
  scene.positions.resize(n * Scene::kTotalSteps);
  for (std::size_t i = 0; i < n; ++i) {
    scene.ped_ids.push_back(static_cast<std::int64_t>(i));
    scene.at(i, 0) = pos[i];
  }

  std::vector<Vec2> accel(n);
  for (std::size_t t = 1; t < Scene::kTotalSteps; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 desired;
      const Vec2 to_goal = agents[i].goal - pos[i];
      const double dist_goal = norm(to_goal);
      if (dist_goal > 1e-12) desired = (agents[i].preferred_speed / dist_goal) * to_goal;
      Vec2 a = (1.0 / config.relaxation_time) * (desired - vel[i]);

      Vec2 push;
      if (config.interaction_strength > 0.0) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const Vec2 away = pos[i] - pos[j];
          const double d2 = away.x * away.x + away.y * away.y;
          const double d = std::sqrt(d2);
          if (d < 1e-12) continue;
          const double magnitude = config.interaction_strength / (d2 + 0.1);
          push = push + (magnitude / d) * away;
        }
        const double m = norm(push);
        if (m > config.max_repulsion) push = (config.max_repulsion / m) * push;
      }
      accel[i] = a + push;
    }
    for (std::size_t i = 0; i < n; ++i) {
      vel[i] = vel[i] + dt * accel[i];
      pos[i] = pos[i] + dt * vel[i];
      scene.at(i, t) = pos[i];
    }
  }
  return scene;
}

std::vector<Scene> generate_synthetic_dataset(const SynthConfig & config, std::uint64_t seed)
{
  config.validate();
  std::vector<Scene> scenes;
  scenes.reserve(config.n_scenes);
  std::uniform_int_distribution<std::size_t> agent_count(config.agents_min, config.agents_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::int64_t next_id = 0;
  for (std::size_t s = 0; s < config.n_scenes; ++s) {
    Rng rng = make_rng(seed, {tag(Stream::scene), s});
    const std::size_t n = agent_count(rng);
    std::vector<SimAgent> agents(n);
    for (auto & agent : agents) {
      // Start on the arena circle and head for a point near the antipode, so
      // paths cross around the center.
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      const double r = config.arena_radius * (0.8 + 0.4 * unit(rng));
      agent.position = {r * std::cos(theta), r * std::sin(theta)};
      const double across = theta + std::numbers::pi + 0.5 * (unit(rng) - 0.5);
      const Vec2 target{config.arena_radius * std::cos(across), config.arena_radius * std::sin(across)};
      const Vec2 dir = (1.0 / norm(target - agent.position)) * (target - agent.position);
      // Goal far beyond the crossing point so nobody arrives within the window.
      agent.goal = agent.position + 100.0 * dir;
      agent.preferred_speed = config.speed_min + (config.speed_max - config.speed_min) * unit(rng);
      const double offset = config.heading_noise * (2.0 * unit(rng) - 1.0);
      const double c = std::cos(offset), sn = std::sin(offset);
      agent.velocity = agent.preferred_speed * Vec2{c * dir.x - sn * dir.y, sn * dir.x + c * dir.y};
    }
    Scene scene = simulate_scene(agents, config);
    scene.start_frame = static_cast<std::int64_t>(s * Scene::kTotalSteps);
    for (auto & id : scene.ped_ids) id = next_id++;
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace socrec::data
