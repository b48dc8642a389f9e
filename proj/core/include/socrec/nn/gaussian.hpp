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

#ifndef SOCREC__NN__GAUSSIAN_HPP_
#define SOCREC__NN__GAUSSIAN_HPP_

#include "socrec/nn/autodiff.hpp"

namespace socrec::nn
{

/// Bounds applied to every log-variance head before exponentiation.
inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

/// Per-agent diagonal Gaussians: row n holds agent n's d_z parameters.
template <typename T>
struct GaussianParams
{
  Tensor<T> mu;
  Tensor<T> sigma;

  std::size_t agents() const { return mu.rows(); }
  std::size_t dim() const { return mu.cols(); }
};

/// Standard normal parameters for `agents` x `dim`.
template <typename T>
GaussianParams<T> standard_normal(std::size_t agents, std::size_t dim);

/// KL(q || p) summed over latent dimensions, averaged over agents.
template <typename T>
T gaussian_kl(const GaussianParams<T> & q, const GaussianParams<T> & p);

template <typename T>
Tensor<T> reparameterize(const GaussianParams<T> & params, const Tensor<T> & noise);

/// Graph-level counterpart of GaussianParams.
template <typename T>
struct GaussianVars
{
  Var<T> mu;
  Var<T> sigma;

  GaussianParams<T> values() const { return {mu.value(), sigma.value()}; }
};

/// sigma = exp(0.5 * clamp(log_var, kLogVarMin, kLogVarMax)).
template <typename T>
GaussianVars<T> gaussian_from_log_var(Var<T> mu, Var<T> log_var);

template <typename T>
Var<T> gaussian_kl(const GaussianVars<T> & q, const GaussianVars<T> & p);

/// mu + sigma * noise, differentiable in mu and sigma.
template <typename T>
Var<T> reparameterize(const GaussianVars<T> & params, const Tensor<T> & noise);

}  // namespace socrec::nn

#endif  // SOCREC__NN__GAUSSIAN_HPP_
