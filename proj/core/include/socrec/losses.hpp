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

#ifndef SOCREC__LOSSES_HPP_
#define SOCREC__LOSSES_HPP_

#include <cstddef>
#include <string>
#include <string_view>

#include "socrec/nn/autodiff.hpp"
#include "socrec/nn/gaussian.hpp"

namespace socrec::losses
{

using nn::GaussianParams;
using nn::GaussianVars;
using nn::Tensor;
using nn::Var;

/*
 * Trajectory tensors use the model's time-major layout: row t * N + agent,
 * columns (x, y). Graph-level versions are differentiable; the Tensor
 * versions evaluate the same expressions without a tape.
 */

/// Mean of squared differences over every coordinate.
template <typename T>
Var<T> mse(Var<T> pred, const Tensor<T> & target);

/// MSE(pred, gt) + KL(q || p).
template <typename T>
Var<T> forecast_loss(
  Var<T> pred, const Tensor<T> & gt, const GaussianVars<T> & q, const GaussianVars<T> & p);

/// MSE(recon, past) + KL(q || N(0, I)). `past` is the unmasked ground truth.
template <typename T>
Var<T> recon_loss(Var<T> recon, const Tensor<T> & past, const GaussianVars<T> & q);

/**
 * @brief Pairwise proximity hinge, (1/m) sum_t sum_{i<j} max(0, eps - dist).
 *
 * m = N(N-1)/2 and the loss is 0 for fewer than two agents. `dist` is the
 * squared distance when `squared` is set, else the plain distance.
 */
template <typename T>
Var<T> social_loss(Var<T> traj, std::size_t agents, T epsilon, bool squared = true);

template <typename T>
T forecast_loss(
  const Tensor<T> & pred, const Tensor<T> & gt, const GaussianParams<T> & q,
  const GaussianParams<T> & p);
template <typename T>
T recon_loss(const Tensor<T> & recon, const Tensor<T> & past, const GaussianParams<T> & q);
template <typename T>
T social_loss(const Tensor<T> & traj, std::size_t agents, T epsilon, bool squared = true);

struct LossWeights
{
  double w_forecast = 1.0;
  double w_recon = 1.0;
  double w_social = 1.0;
};

struct LossBreakdown
{
  double l_f = 0.0;
  double l_r = 0.0;
  double l_soc_f = 0.0;
  double l_soc_r = 0.0;
  double total = 0.0;
};

/// Fills `total` from the four parts; throws std::invalid_argument on non-finite weights.
LossBreakdown total_loss(LossBreakdown parts, const LossWeights & weights);

inline constexpr std::string_view kLossLogHeader = "epoch,l_f,l_r,l_soc_f,l_soc_r,total";
std::string loss_log_row(int epoch, const LossBreakdown & losses);

}  // namespace socrec::losses

#endif  // SOCREC__LOSSES_HPP_
