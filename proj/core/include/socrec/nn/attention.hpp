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

#ifndef SOCREC__NN__ATTENTION_HPP_
#define SOCREC__NN__ATTENTION_HPP_

#include <cstddef>
#include <vector>

#include "socrec/nn/autodiff.hpp"

namespace socrec::nn
{

/**
 * @brief Binary same-agent indicator between two token sequences.
 *
 * Sequences are laid out time-major in blocks of N agents, so token index
 * t * N + n belongs to agent n. Entry (i, j) is 1 iff i mod N == j mod N.
 * Query and key sequences may have different lengths (cross-attention).
 */
class AgentMask
{
public:
  AgentMask(std::size_t agents, std::size_t query_steps, std::size_t key_steps);

  std::size_t agents() const { return agents_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * cols_ + j] != 0; }

  template <typename T>
  Tensor<T> as_tensor() const
  {
    Tensor<T> out(rows_, cols_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] ? T{1} : T{0};
    return out;
  }

private:
  std::size_t agents_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<unsigned char> bits_;
};

/// Square mask over a sequence of `steps` timesteps. Throws on zero sizes.
AgentMask build_agent_mask(std::size_t agents, std::size_t steps);
AgentMask build_agent_mask(std::size_t agents, std::size_t query_steps, std::size_t key_steps);

/// Additive mask letting token (t, n) see tokens (t', m) with t' <= t only.
template <typename T>
Tensor<T> causal_mask(std::size_t agents, std::size_t steps);

/// Projection weights of one agent-aware attention block (each d_in x d_model).
template <typename T>
struct AttentionProjections
{
  Var<T> query_self;
  Var<T> query_other;
  Var<T> key_self;
  Var<T> key_other;
  Var<T> value;
};

/**
 * @brief Multi-head agent-aware attention.
 *
 * Per head h the score matrix is
 *   A = M * (Q_self K_self^T) + (1 - M) * (Q_other K_other^T)
 * and the head output is softmax(A / sqrt(d_head) + causal) V. Heads are
 * concatenated back to d_model columns; no output projection is applied.
 */
template <typename T>
Var<T> agent_aware_attention(
  Var<T> query, Var<T> key, Var<T> value, const AgentMask & mask,
  const AttentionProjections<T> & weights, std::size_t heads,
  const Tensor<T> * causal = nullptr);

}  // namespace socrec::nn

#endif  // SOCREC__NN__ATTENTION_HPP_
