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

#ifndef SOCREC__PREDICTION_HPP_
#define SOCREC__PREDICTION_HPP_

#include <cstddef>
#include <vector>

#include "socrec/data.hpp"

namespace socrec
{

/// K sampled futures for N agents: points[(k * N + agent) * 12 + t].
struct PredictionSet
{
  std::size_t samples = 0;
  std::size_t agents = 0;
  std::vector<data::Vec2> points;

  PredictionSet() = default;
  PredictionSet(std::size_t k, std::size_t n)
  : samples(k), agents(n), points(k * n * data::Scene::kFutureSteps)
  {
  }

  data::Vec2 & at(std::size_t k, std::size_t agent, std::size_t t)
  {
    return points[(k * agents + agent) * data::Scene::kFutureSteps + t];
  }
  const data::Vec2 & at(std::size_t k, std::size_t agent, std::size_t t) const
  {
    return points[(k * agents + agent) * data::Scene::kFutureSteps + t];
  }

  bool all_finite() const;
};

/// Future part of a scene as a single-sample set (the ground truth).
PredictionSet ground_truth_future(const data::Scene & scene);

}  // namespace socrec

#endif  // SOCREC__PREDICTION_HPP_
