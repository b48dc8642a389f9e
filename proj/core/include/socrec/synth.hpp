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

#ifndef SOCREC__SYNTH_HPP_
#define SOCREC__SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "socrec/data.hpp"

namespace socrec::data
{

/// Parameters of the goal-directed repulsion crowd simulator.
struct SynthConfig
{
  std::size_t n_scenes = 50;
  std::size_t agents_min = 2;
  std::size_t agents_max = 4;
  double speed_min = 0.8;   // m/s
  double speed_max = 1.6;   // m/s
  double interaction_strength = 0.5;  // k in k / (d^2 + 0.1), m^3/s^2
  double heading_noise = 0.0;  // initial heading offset from the goal direction, radians (max)
  double arena_radius = 4.0;   // m; agents start on this circle and head across it
  double relaxation_time = 1.0;  // s
  double time_step = 0.4;        // s
  double max_repulsion = 5.0;    // m/s^2

  void validate() const;
};

struct SimAgent
{
  Vec2 position;
  Vec2 velocity;
  Vec2 goal;
  double preferred_speed = 1.0;
};

/**
 * @brief Integrates 20 steps of goal-seeking agents with pairwise repulsion.
 *
 * Each agent relaxes towards preferred_speed * unit(goal - p) with time
 * constant relaxation_time and is pushed away from every other agent by
 * k / (d^2 + 0.1), with the summed repulsion capped at max_repulsion.
 * Explicit Euler: v += dt * a, then p += dt * v. The first frame is the
 * initial state.
 */
Scene simulate_scene(const std::vector<SimAgent> & agents, const SynthConfig & config);

/// Deterministic in `seed`; scenes are tagged real.
std::vector<Scene> generate_synthetic_dataset(const SynthConfig & config, std::uint64_t seed);

}  // namespace socrec::data

#endif  // SOCREC__SYNTH_HPP_
