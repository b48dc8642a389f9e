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

#ifndef SOCREC__NN__AUTODIFF_HPP_
#define SOCREC__NN__AUTODIFF_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "socrec/nn/tensor.hpp"

namespace socrec::nn
{

/// A named learnable tensor. `index` is its slot in the owning store.
template <typename T>
struct Parameter
{
  std::string name;
  Tensor<T> value;
  std::size_t index = 0;
};

/**
 * @brief Ordered collection of parameters with stable addresses.
 *
 * Insertion order defines the slot of every parameter in a GradientBuffer
 * and in checkpoint files.
 */
template <typename T>
class ParameterStore
{
public:
  Parameter<T> & add(std::string name, Tensor<T> value);

  std::size_t size() const { return params_.size(); }
  Parameter<T> & operator[](std::size_t i) { return params_[i]; }
  const Parameter<T> & operator[](std::size_t i) const { return params_[i]; }

  /// nullptr when no parameter carries `name`.
  const Parameter<T> * find(std::string_view name) const;
  Parameter<T> * find(std::string_view name);

  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

private:
  std::deque<Parameter<T>> params_;
};

/// One gradient tensor per parameter slot.
template <typename T>
class GradientBuffer
{
public:
  GradientBuffer() = default;
  explicit GradientBuffer(const ParameterStore<T> & store);

  std::size_t size() const { return grads_.size(); }
  Tensor<T> & operator[](std::size_t i) { return grads_[i]; }
  const Tensor<T> & operator[](std::size_t i) const { return grads_[i]; }

  void zero();
  void add(const GradientBuffer & other);
  void scale(T factor);
  bool all_finite() const;

private:
  std::vector<Tensor<T>> grads_;
};

template <typename T>
class Graph;

/// Handle to a node in a Graph. Cheap to copy; only valid while the graph lives.
template <typename T>
class Var
{
public:
  Var() = default;
  Var(Graph<T> * graph, std::size_t id) : graph_(graph), id_(id) {}

  bool valid() const { return graph_ != nullptr; }
  Graph<T> & graph() const { return *graph_; }
  std::size_t id() const { return id_; }

  const Tensor<T> & value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

private:
  Graph<T> * graph_ = nullptr;
  std::size_t id_ = 0;
};

/**
 * @brief Reverse-mode tape.
 *
 * Nodes are appended in evaluation order, so a reverse sweep over ids is a
 * valid topological order for backpropagation. A graph is single-use and
 * single-threaded; parameters are only read through it, and their gradients
 * are deposited into a caller-owned GradientBuffer.
 */
template <typename T>
class Graph
{
public:
  using BackwardFn = std::function<void(Graph &, std::size_t)>;

  Graph() = default;
  Graph(const Graph &) = delete;
  Graph & operator=(const Graph &) = delete;

  Var<T> constant(Tensor<T> value);
  /// Leaf that requires a gradient, readable through grad() after backward().
  Var<T> input(Tensor<T> value);
  /// Leaf referencing a parameter; the parameter must outlive the graph.
  Var<T> param(const Parameter<T> & p);

  /// Records a computed node. `backward` receives the graph and the node id.
  Var<T> emit(Tensor<T> value, bool requires_grad, BackwardFn backward);

  void backward(Var<T> loss, GradientBuffer<T> * sink = nullptr);

  /// When disabled, parameter and input leaves are recorded as constants and
  /// no backward closures are kept (inference).
  void set_grad_enabled(bool enabled) { grad_enabled_ = enabled; }
  bool grad_enabled() const { return grad_enabled_; }

  const Tensor<T> & value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Zero-initialised accumulator for node `id`.
  Tensor<T> & grad_of(std::size_t id);
  /// Gradient after backward(); empty when nothing flowed into the node.
  const Tensor<T> & grad(Var<T> v) const { return nodes_[v.id()].grad; }

  std::size_t size() const { return nodes_.size(); }

private:
  struct Node
  {
    Tensor<T> owned;
    const Tensor<T> * external = nullptr;
    Tensor<T> grad;
    bool requires_grad = false;
    std::optional<std::size_t> param_slot;
    BackwardFn backward;
  };

  // deque: values handed out by Var::value() stay valid as the tape grows.
  std::deque<Node> nodes_;
  bool grad_enabled_ = true;
};

template <typename T>
const Tensor<T> & Var<T>::value() const
{
  return graph_->value(id_);
}

// ---- differentiable operations ---------------------------------------------

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b);
/// a * b^T
template <typename T>
Var<T> matmul_nt(Var<T> a, Var<T> b);
template <typename T>
Var<T> add(Var<T> a, Var<T> b);
template <typename T>
Var<T> sub(Var<T> a, Var<T> b);
/// Elementwise product.
template <typename T>
Var<T> mul(Var<T> a, Var<T> b);
template <typename T>
Var<T> div(Var<T> a, Var<T> b);
/// Adds a 1 x cols row to every row of `a`.
template <typename T>
Var<T> add_row(Var<T> a, Var<T> row);
template <typename T>
Var<T> scale(Var<T> a, T factor);
template <typename T>
Var<T> add_scalar(Var<T> a, T offset);
template <typename T>
Var<T> relu(Var<T> a);
template <typename T>
Var<T> exp(Var<T> a);
template <typename T>
Var<T> square(Var<T> a);
/// Elementwise square root of a non-negative input; the gradient at 0 is taken as 0.
template <typename T>
Var<T> sqrt(Var<T> a);
/// Gradient is zero where the input lies outside [lo, hi].
template <typename T>
Var<T> clamp(Var<T> a, T lo, T hi);

/// Row-wise softmax of (a + additive_mask). Masked entries use -infinity.
template <typename T>
Var<T> softmax_rows(Var<T> a, const Tensor<T> * additive_mask = nullptr);

template <typename T>
Var<T> layer_norm(Var<T> a, Var<T> gain, Var<T> bias, T eps = T(1e-5));

template <typename T>
Var<T> slice_cols(Var<T> a, std::size_t begin, std::size_t end);
template <typename T>
Var<T> concat_cols(const std::vector<Var<T>> & parts);
/// out.row(i) = a.row(index[i]); repeated indices accumulate gradient.
template <typename T>
Var<T> gather_rows(Var<T> a, std::vector<std::size_t> index);
template <typename T>
Var<T> concat_rows(const std::vector<Var<T>> & parts);

/// Sum over columns: rows x 1.
template <typename T>
Var<T> row_sum(Var<T> a);
template <typename T>
Var<T> sum(Var<T> a);
template <typename T>
Var<T> mean(Var<T> a);

/// x * W + b with W of shape in x out and b of shape 1 x out.
template <typename T>
Var<T> linear(Var<T> x, Var<T> weight, Var<T> bias);

/// Inverted dropout. Identity when `rate` is zero.
template <typename T>
Var<T> dropout(Var<T> a, T rate, std::mt19937_64 & rng);

template <typename T>
Var<T> operator+(Var<T> a, Var<T> b)
{
  return add(a, b);
}

template <typename T>
Var<T> operator-(Var<T> a, Var<T> b)
{
  return sub(a, b);
}

}  // namespace socrec::nn

#endif  // SOCREC__NN__AUTODIFF_HPP_
