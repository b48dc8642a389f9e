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

#include "socrec/nn/gaussian.hpp"

#include <cmath>
#include <string>

namespace socrec::nn
{

namespace
{

template <typename T>
void check_pair(const Tensor<T> & mu, const Tensor<T> & sigma, const char * what)
{
  if (!mu.same_shape(sigma)) {
    throw ShapeError(std::string(what) + ": mu " + shape_string(mu) + " vs sigma " + shape_string(sigma));
  }
  for (const T s : sigma.values()) {
    if (!(s > T{0})) throw std::domain_error(std::string(what) + ": sigma must be positive");
  }
}

template <typename T>
void check_kl_operands(const Tensor<T> & mq, const Tensor<T> & sq, const Tensor<T> & mp, const Tensor<T> & sp)
{
  check_pair(mq, sq, "gaussian_kl(q)");
  check_pair(mp, sp, "gaussian_kl(p)");
  if (!mq.same_shape(mp)) {
    throw ShapeError("gaussian_kl: q " + shape_string(mq) + " vs p " + shape_string(mp));
  }
  if (mq.rows() == 0) throw ShapeError("gaussian_kl: no agents");
}

// Per-element KL(N(mq, sq^2) || N(mp, sp^2)).
template <typename T>
T kl_term(T mq, T sq, T mp, T sp)
{
  const T d = mq - mp;
  return std::log(sp / sq) + (sq * sq + d * d) / (T{2} * sp * sp) - T{0.5};
}

}  // namespace

template <typename T>
GaussianParams<T> standard_normal(std::size_t agents, std::size_t dim)
{
  return {Tensor<T>(agents, dim, T{0}), Tensor<T>(agents, dim, T{1})};
}

template <typename T>
T gaussian_kl(const GaussianParams<T> & q, const GaussianParams<T> & p)
{
  check_kl_operands(q.mu, q.sigma, p.mu, p.sigma);
  T total{};
  for (std::size_t i = 0; i < q.mu.size(); ++i) {
    total += kl_term(q.mu[i], q.sigma[i], p.mu[i], p.sigma[i]);
  }
  return total / static_cast<T>(q.mu.rows());
}

template <typename T>
Tensor<T> reparameterize(const GaussianParams<T> & params, const Tensor<T> & noise)
{
  if (!params.mu.same_shape(noise) || !params.sigma.same_shape(noise)) {
    throw ShapeError(
      "reparameterize: params " + shape_string(params.mu) + ", noise " + shape_string(noise));
  }
  Tensor<T> z(noise.rows(), noise.cols());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = params.mu[i] + params.sigma[i] * noise[i];
  return z;
}

template <typename T>
GaussianVars<T> gaussian_from_log_var(Var<T> mu, Var<T> log_var)
{
  if (!mu.value().same_shape(log_var.value())) {
    throw ShapeError("gaussian head: mu and log-variance shapes differ");
  }
  const Var<T> clamped = clamp(log_var, static_cast<T>(kLogVarMin), static_cast<T>(kLogVarMax));
  return {mu, exp(scale(clamped, T{0.5}))};
}

template <typename T>
Var<T> gaussian_kl(const GaussianVars<T> & q, const GaussianVars<T> & p)
{
  const Tensor<T> & mq = q.mu.value();
  const Tensor<T> & sq = q.sigma.value();
  const Tensor<T> & mp = p.mu.value();
  const Tensor<T> & sp = p.sigma.value();
  check_kl_operands(mq, sq, mp, sp);
  const T inv_agents = T{1} / static_cast<T>(mq.rows());
  T total{};
  for (std::size_t i = 0; i < mq.size(); ++i) total += kl_term(mq[i], sq[i], mp[i], sp[i]);

  Graph<T> & g = q.mu.graph();
  const std::size_t ids[4] = {q.mu.id(), q.sigma.id(), p.mu.id(), p.sigma.id()};
  bool grad = false;
  for (const std::size_t id : ids) grad = grad || g.requires_grad(id);
  return g.emit(
    Tensor<T>(1, 1, total * inv_agents), grad,
    [imq = ids[0], isq = ids[1], imp = ids[2], isp = ids[3], inv_agents](Graph<T> & g, std::size_t self) {
      const T gy = g.grad_of(self)[0] * inv_agents;
      const Tensor<T> & mq = g.value(imq);
      const Tensor<T> & sq = g.value(isq);
      const Tensor<T> & mp = g.value(imp);
      const Tensor<T> & sp = g.value(isp);
      for (std::size_t i = 0; i < mq.size(); ++i) {
        const T d = mq[i] - mp[i];
        const T vp = sp[i] * sp[i];
        if (g.requires_grad(imq)) g.grad_of(imq)[i] += gy * d / vp;
        if (g.requires_grad(imp)) g.grad_of(imp)[i] -= gy * d / vp;
        if (g.requires_grad(isq)) g.grad_of(isq)[i] += gy * (sq[i] / vp - T{1} / sq[i]);
        if (g.requires_grad(isp)) {
          g.grad_of(isp)[i] += gy * (T{1} / sp[i] - (sq[i] * sq[i] + d * d) / (vp * sp[i]));
        }
      }
    });
}

template <typename T>
Var<T> reparameterize(const GaussianVars<T> & params, const Tensor<T> & noise)
{
  if (!params.mu.value().same_shape(noise) || !params.sigma.value().same_shape(noise)) {
    throw ShapeError(
      "reparameterize: params " + shape_string(params.mu.value()) + ", noise " +
      shape_string(noise));
  }
  Graph<T> & g = params.mu.graph();
  return add(params.mu, mul(params.sigma, g.constant(noise)));
}

#define SOCREC_INSTANTIATE(T)                                                               \
  template GaussianParams<T> standard_normal<T>(std::size_t, std::size_t);                  \
  template T gaussian_kl(const GaussianParams<T> &, const GaussianParams<T> &);              \
  template Tensor<T> reparameterize(const GaussianParams<T> &, const Tensor<T> &);           \
  template GaussianVars<T> gaussian_from_log_var(Var<T>, Var<T>);                            \
  template Var<T> gaussian_kl(const GaussianVars<T> &, const GaussianVars<T> &);             \
  template Var<T> reparameterize(const GaussianVars<T> &, const Tensor<T> &);

SOCREC_INSTANTIATE(float)
SOCREC_INSTANTIATE(double)

#undef SOCREC_INSTANTIATE

}  // namespace socrec::nn
