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

#include "socrec/prediction.hpp"

#include <cmath>

namespace socrec
{

bool PredictionSet::all_finite() const
{
  for (const auto & p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  }
  return true;
}

PredictionSet ground_truth_future(const data::Scene & scene)
{
  PredictionSet out(1, scene.agents());
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    for (std::size_t t = 0; t < data::Scene::kFutureSteps; ++t) {
      out.at(0, a, t) = scene.at(a, data::Scene::kPastSteps + t);
    }
  }
  return out;
}

}  // namespace socrec
