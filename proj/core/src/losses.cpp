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

#include "socrec/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "socrec/data.hpp"
#include "socrec/errors.hpp"

namespace socrec::losses
{

namespace
{

template <typename T>
void require_same(const Tensor<T> & a, const Tensor<T> & b, const char * what)
{
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": " + nn::shape_string(a) + " vs " + nn::shape_string(b));
  }
}

template <typename T>
void require_trajectory(const Tensor<T> & traj, std::size_t agents)
{
  if (traj.cols() != 2 || (agents > 0 && traj.rows() % agents != 0) || (agents == 0 && traj.rows() != 0)) {
    throw ShapeError(
      "social_loss: " + nn::shape_string(traj) + " is not a trajectory of " + std::to_string(agents) +
      " agents");
  }
}

}  // namespace

template <typename T>
Var<T> mse(Var<T> pred, const Tensor<T> & target)
{
  require_same(pred.value(), target, "mse");
  return nn::mean(nn::square(pred - pred.graph().constant(target)));
}

template <typename T>
Var<T> forecast_loss(
  Var<T> pred, const Tensor<T> & gt, const GaussianVars<T> & q, const GaussianVars<T> & p)
{
  return mse(pred, gt) + nn::gaussian_kl(q, p);
}

template <typename T>
Var<T> recon_loss(Var<T> recon, const Tensor<T> & past, const GaussianVars<T> & q)
{
  auto & g = recon.graph();
  const auto prior = nn::standard_normal<T>(q.mu.rows(), q.mu.cols());
  const GaussianVars<T> p{g.constant(prior.mu), g.constant(prior.sigma)};
  return mse(recon, past) + nn::gaussian_kl(q, p);
}

template <typename T>
Var<T> social_loss(Var<T> traj, std::size_t agents, T epsilon, bool squared)
{
  require_trajectory(traj.value(), agents);
  if (!(epsilon >= T{0})) throw std::invalid_argument("social_loss: epsilon must be >= 0");
  auto & g = traj.graph();
  if (agents < 2) return g.constant(Tensor<T>(1, 1));
  const std::size_t steps = traj.rows() / agents;
  // All pairs at once: row (pair, t) of `left - right` is agent i minus agent j.
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j = i + 1; j < agents; ++j) {
      for (std::size_t t = 0; t < steps; ++t) {
        left.push_back(t * agents + i);
        right.push_back(t * agents + j);
      }
    }
  }
  const std::size_t pairs = agents * (agents - 1) / 2;
  Var<T> dist = nn::row_sum(nn::square(nn::gather_rows(traj, left) - nn::gather_rows(traj, right)));
  if (!squared) dist = nn::sqrt(dist);
  const Var<T> hinge = nn::relu(nn::add_scalar(nn::scale(dist, T{-1}), epsilon));
  return nn::scale(nn::sum(hinge), T{1} / static_cast<T>(pairs));
}

template <typename T>
T forecast_loss(
  const Tensor<T> & pred, const Tensor<T> & gt, const GaussianParams<T> & q,
  const GaussianParams<T> & p)
{
  nn::Graph<T> g;
  g.set_grad_enabled(false);
  const GaussianVars<T> qv{g.constant(q.mu), g.constant(q.sigma)};
  const GaussianVars<T> pv{g.constant(p.mu), g.constant(p.sigma)};
  return forecast_loss(g.constant(pred), gt, qv, pv).value()[0];
}

template <typename T>
T recon_loss(const Tensor<T> & recon, const Tensor<T> & past, const GaussianParams<T> & q)
{
  nn::Graph<T> g;
  g.set_grad_enabled(false);
  const GaussianVars<T> qv{g.constant(q.mu), g.constant(q.sigma)};
  return recon_loss(g.constant(recon), past, qv).value()[0];
}

template <typename T>
T social_loss(const Tensor<T> & traj, std::size_t agents, T epsilon, bool squared)
{
  nn::Graph<T> g;
  g.set_grad_enabled(false);
  return social_loss(g.constant(traj), agents, epsilon, squared).value()[0];
}

LossBreakdown total_loss(LossBreakdown parts, const LossWeights & w)
{
  if (!std::isfinite(w.w_forecast) || !std::isfinite(w.w_recon) || !std::isfinite(w.w_social)) {
    throw std::invalid_argument("total_loss: non-finite weight");
  }
  parts.total = w.w_forecast * parts.l_f + w.w_recon * parts.l_r + w.w_social * (parts.l_soc_f + parts.l_soc_r);
  return parts;
}

std::string loss_log_row(int epoch, const LossBreakdown & l)
{
  std::string row = std::to_string(epoch);
  for (double v : {l.l_f, l.l_r, l.l_soc_f, l.l_soc_r, l.total}) {
    row += ',';
    row += data::format_double(v);
  }
  return row;
}

#define SOCREC_INSTANTIATE(T)                                                                      \
  template Var<T> mse(Var<T>, const Tensor<T> &);                                                 \
  template Var<T> forecast_loss(Var<T>, const Tensor<T> &, const GaussianVars<T> &, const GaussianVars<T> &); \
  template Var<T> recon_loss(Var<T>, const Tensor<T> &, const GaussianVars<T> &);                 \
  template Var<T> social_loss(Var<T>, std::size_t, T, bool);                                      \
  template T forecast_loss(const Tensor<T> &, const Tensor<T> &, const GaussianParams<T> &, const GaussianParams<T> &); \
  template T recon_loss(const Tensor<T> &, const Tensor<T> &, const GaussianParams<T> &);         \
  template T social_loss(const Tensor<T> &, std::size_t, T, bool);

SOCREC_INSTANTIATE(float)
SOCREC_INSTANTIATE(double)

#undef SOCREC_INSTANTIATE

}  // namespace socrec::losses
