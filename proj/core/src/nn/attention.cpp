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

#include "socrec/nn/attention.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace socrec::nn
{

AgentMask::AgentMask(std::size_t agents, std::size_t query_steps, std::size_t key_steps)
: agents_(agents), rows_(agents * query_steps), cols_(agents * key_steps)
{
  if (agents == 0 || query_steps == 0 || key_steps == 0) {
    throw std::invalid_argument("agent mask needs at least one agent and one timestep");
  }
  bits_.resize(rows_ * cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) bits_[i * cols_ + j] = (i % agents_) == (j % agents_);
  }
}

AgentMask build_agent_mask(std::size_t agents, std::size_t steps)
{
  return AgentMask(agents, steps, steps);
}

AgentMask build_agent_mask(std::size_t agents, std::size_t query_steps, std::size_t key_steps)
{
  return AgentMask(agents, query_steps, key_steps);
}

template <typename T>
Tensor<T> causal_mask(std::size_t agents, std::size_t steps)
{
  const std::size_t L = agents * steps;
  Tensor<T> out(L, L);
  const T blocked = -std::numeric_limits<T>::infinity();
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      if (j / agents > i / agents) out(i, j) = blocked;
    }
  }
  return out;
}

template <typename T>
Var<T> agent_aware_attention(
  Var<T> query, Var<T> key, Var<T> value, const AgentMask & mask,
  const AttentionProjections<T> & w, std::size_t heads, const Tensor<T> * causal)
{
  if (heads == 0) throw std::invalid_argument("attention needs at least one head");
  if (key.rows() != value.rows()) {
    throw ShapeError(
      "attention: " + std::to_string(key.rows()) + " keys vs " + std::to_string(value.rows()) +
      " values");
  }
  if (mask.rows() != query.rows() || mask.cols() != key.rows()) {
    throw ShapeError(
      "attention: mask " + shape_string(mask.rows(), mask.cols()) + " for " +
      std::to_string(query.rows()) + " queries and " + std::to_string(key.rows()) + " keys");
  }
  const std::size_t d_model = w.query_self.cols();
  for (const Var<T> * p : {&w.query_other, &w.key_self, &w.key_other, &w.value}) {
    if (p->cols() != d_model) throw ShapeError("attention: projections disagree on d_model");
  }
  if (d_model % heads != 0) {
    throw ShapeError(
      "attention: d_model " + std::to_string(d_model) + " not divisible by " +
      std::to_string(heads) + " heads");
  }
  if (causal != nullptr && (causal->rows() != mask.rows() || causal->cols() != mask.cols())) {
    throw ShapeError("attention: causal mask shape " + shape_string(*causal));
  }

  Graph<T> & g = query.graph();
  const Var<T> qs = matmul(query, w.query_self);
  const Var<T> qo = matmul(query, w.query_other);
  const Var<T> ks = matmul(key, w.key_self);
  const Var<T> ko = matmul(key, w.key_other);
  const Var<T> v = matmul(value, w.value);

  Tensor<T> self_bits = mask.template as_tensor<T>();
  Tensor<T> other_bits(self_bits.rows(), self_bits.cols());
  for (std::size_t i = 0; i < self_bits.size(); ++i) other_bits[i] = T{1} - self_bits[i];
  const Var<T> m_self = g.constant(std::move(self_bits));
  const Var<T> m_other = g.constant(std::move(other_bits));

  const std::size_t d_head = d_model / heads;
  const T inv_scale = T{1} / std::sqrt(static_cast<T>(d_head));
  std::vector<Var<T>> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t b = h * d_head, e = b + d_head;
    const Var<T> s_self = matmul_nt(slice_cols(qs, b, e), slice_cols(ks, b, e));
    const Var<T> s_other = matmul_nt(slice_cols(qo, b, e), slice_cols(ko, b, e));
    const Var<T> scores = add(mul(s_self, m_self), mul(s_other, m_other));
    const Var<T> weights = softmax_rows(scale(scores, inv_scale), causal);
    outputs.push_back(matmul(weights, slice_cols(v, b, e)));
  }
  return heads == 1 ? outputs.front() : concat_cols(outputs);
}

template Tensor<float> causal_mask<float>(std::size_t, std::size_t);
template Tensor<double> causal_mask<double>(std::size_t, std::size_t);
template Var<float> agent_aware_attention(
  Var<float>, Var<float>, Var<float>, const AgentMask &, const AttentionProjections<float> &,
  std::size_t, const Tensor<float> *);
template Var<double> agent_aware_attention(
  Var<double>, Var<double>, Var<double>, const AgentMask &, const AttentionProjections<double> &,
  std::size_t, const Tensor<double> *);

}  // namespace socrec::nn
