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

#include "socrec/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace socrec::nn
{

// ---- ParameterStore ---------------------------------------------------------

template <typename T>
Parameter<T> & ParameterStore<T>::add(std::string name, Tensor<T> value)
{
  if (find(name) != nullptr) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  params_.push_back(Parameter<T>{std::move(name), std::move(value), params_.size()});
  return params_.back();
}

template <typename T>
const Parameter<T> * ParameterStore<T>::find(std::string_view name) const
{
  for (const auto & p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
Parameter<T> * ParameterStore<T>::find(std::string_view name)
{
  for (auto & p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
std::size_t ParameterStore<T>::scalar_count() const
{
  std::size_t n = 0;
  for (const auto & p : params_) n += p.value.size();
  return n;
}

// ---- GradientBuffer ---------------------------------------------------------

template <typename T>
GradientBuffer<T>::GradientBuffer(const ParameterStore<T> & store)
{
  grads_.reserve(store.size());
  for (const auto & p : store) grads_.emplace_back(p.value.rows(), p.value.cols());
}

template <typename T>
void GradientBuffer<T>::zero()
{
  for (auto & g : grads_) g.fill(T{0});
}

template <typename T>
void GradientBuffer<T>::add(const GradientBuffer & other)
{
  if (other.grads_.size() != grads_.size()) throw ShapeError("gradient buffer size mismatch");
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    auto dst = grads_[i].values();
    auto src = other.grads_[i].values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

template <typename T>
void GradientBuffer<T>::scale(T factor)
{
  for (auto & g : grads_) {
    for (auto & v : g.values()) v *= factor;
  }
}

template <typename T>
bool GradientBuffer<T>::all_finite() const
{
  return std::all_of(grads_.begin(), grads_.end(), [](const Tensor<T> & g) {
    return g.all_finite();
  });
}

// ---- Graph ------------------------------------------------------------------

template <typename T>
Var<T> Graph<T>::constant(Tensor<T> value)
{
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::input(Tensor<T> value)
{
  Node n;
  n.owned = std::move(value);
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::param(const Parameter<T> & p)
{
  Node n;
  n.external = &p.value;
  n.requires_grad = grad_enabled_;
  n.param_slot = p.index;
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::emit(Tensor<T> value, bool requires_grad, BackwardFn backward)
{
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
const Tensor<T> & Graph<T>::value(std::size_t id) const
{
  const Node & n = nodes_[id];
  return n.external != nullptr ? *n.external : n.owned;
}

template <typename T>
Tensor<T> & Graph<T>::grad_of(std::size_t id)
{
  Node & n = nodes_[id];
  if (n.grad.empty()) {
    const Tensor<T> & v = value(id);
    n.grad = Tensor<T>(v.rows(), v.cols());
  }
  return n.grad;
}

template <typename T>
void Graph<T>::backward(Var<T> loss, GradientBuffer<T> * sink)
{
  if (&loss.graph() != this) throw std::invalid_argument("loss belongs to another graph");
  const Tensor<T> & lv = value(loss.id());
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward() needs a 1x1 loss, got " + shape_string(lv));
  }
  for (auto & n : nodes_) n.grad = Tensor<T>();
  if (!nodes_[loss.id()].requires_grad) return;
  grad_of(loss.id())[0] = T{1};
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node & n = nodes_[id];
    if (n.grad.empty()) continue;
    if (n.backward) n.backward(*this, id);
    if (sink != nullptr && n.param_slot) {
      Tensor<T> & dst = (*sink)[*n.param_slot];
      if (!dst.same_shape(n.grad)) throw ShapeError("gradient buffer does not match parameter");
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad[i];
    }
  }
}

// ---- operations -------------------------------------------------------------

namespace
{

template <typename T>
void require_same_graph(const Var<T> & a, const Var<T> & b)
{
  if (&a.graph() != &b.graph()) throw std::invalid_argument("operands belong to different graphs");
}

template <typename T>
void require_same_shape(const Tensor<T> & a, const Tensor<T> & b, const char * op)
{
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": " + shape_string(a) + " vs " + shape_string(b));
  }
}

template <typename T>
bool any_grad(const Var<T> & a)
{
  return a.graph().requires_grad(a.id());
}

template <typename T>
bool any_grad(const Var<T> & a, const Var<T> & b)
{
  return any_grad(a) || any_grad(b);
}

// Unary elementwise op with a derivative expressed through input and output.
template <typename T, typename Fwd, typename Deriv>
Var<T> unary(Var<T> a, Fwd fwd, Deriv deriv)
{
  const Tensor<T> & x = a.value();
  Tensor<T> y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
  const std::size_t ia = a.id();
  return a.graph().emit(std::move(y), any_grad(a), [ia, deriv](Graph<T> & g, std::size_t self) {
    if (!g.requires_grad(ia)) return;
    const Tensor<T> & x = g.value(ia);
    const Tensor<T> & y = g.value(self);
    const Tensor<T> & gy = g.grad_of(self);
    Tensor<T> & gx = g.grad_of(ia);
    for (std::size_t i = 0; i < x.size(); ++i) gx[i] += gy[i] * deriv(x[i], y[i]);
  });
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b)
{
  require_same_graph(a, b);
  const Tensor<T> & A = a.value();
  const Tensor<T> & B = b.value();
  if (A.cols() != B.rows()) {
    throw ShapeError("matmul: " + shape_string(A) + " * " + shape_string(B));
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor<T> C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    T * c = C.row(i);
    const T * arow = A.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      const T * brow = B.row(p);
      for (std::size_t j = 0; j < n; ++j) c[j] += av * brow[j];
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().emit(std::move(C), any_grad(a, b), [ia, ib, m, k, n](Graph<T> & g, std::size_t self) {
    const Tensor<T> & A = g.value(ia);
    const Tensor<T> & B = g.value(ib);
    const Tensor<T> & dC = g.grad_of(self);
    if (g.requires_grad(ia)) {
      Tensor<T> & dA = g.grad_of(ia);
      for (std::size_t i = 0; i < m; ++i) {
        const T * dc = dC.row(i);
        T * da = dA.row(i);
        for (std::size_t p = 0; p < k; ++p) {
          const T * brow = B.row(p);
          T acc{};
          for (std::size_t j = 0; j < n; ++j) acc += dc[j] * brow[j];
          da[p] += acc;
        }
      }
    }
    if (g.requires_grad(ib)) {
      Tensor<T> & dB = g.grad_of(ib);
      for (std::size_t i = 0; i < m; ++i) {
        const T * dc = dC.row(i);
        const T * arow = A.row(i);
        for (std::size_t p = 0; p < k; ++p) {
          const T av = arow[p];
          T * db = dB.row(p);
          for (std::size_t j = 0; j < n; ++j) db[j] += av * dc[j];
        }
      }
    }
  });
}

template <typename T>
Var<T> matmul_nt(Var<T> a, Var<T> b)
{
  require_same_graph(a, b);
  const Tensor<T> & A = a.value();
  const Tensor<T> & B = b.value();
  if (A.cols() != B.cols()) {
    throw ShapeError("matmul_nt: " + shape_string(A) + " * (" + shape_string(B) + ")^T");
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
  Tensor<T> C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const T * arow = A.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const T * brow = B.row(j);
      T acc{};
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      C(i, j) = acc;
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().emit(std::move(C), any_grad(a, b), [ia, ib, m, k, n](Graph<T> & g, std::size_t self) {
    const Tensor<T> & A = g.value(ia);
    const Tensor<T> & B = g.value(ib);
    const Tensor<T> & dC = g.grad_of(self);
    if (g.requires_grad(ia)) {
      Tensor<T> & dA = g.grad_of(ia);
      for (std::size_t i = 0; i < m; ++i) {
        T * da = dA.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          const T d = dC(i, j);
          const T * brow = B.row(j);
          for (std::size_t p = 0; p < k; ++p) da[p] += d * brow[p];
        }
      }
    }
    if (g.requires_grad(ib)) {
      Tensor<T> & dB = g.grad_of(ib);
      for (std::size_t i = 0; i < m; ++i) {
        const T * arow = A.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          const T d = dC(i, j);
          T * db = dB.row(j);
          for (std::size_t p = 0; p < k; ++p) db[p] += d * arow[p];
        }
      }
    }
  });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b)
{
  require_same_graph(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor<T> y = a.value();
  const Tensor<T> & B = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().emit(std::move(y), any_grad(a, b), [ia, ib](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    for (const std::size_t id : {ia, ib}) {
      if (!g.requires_grad(id)) continue;
      Tensor<T> & gx = g.grad_of(id);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
  });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b)
{
  require_same_graph(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor<T> y = a.value();
  const Tensor<T> & B = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().emit(std::move(y), any_grad(a, b), [ia, ib](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    if (g.requires_grad(ia)) {
      Tensor<T> & gx = g.grad_of(ia);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
    if (g.requires_grad(ib)) {
      Tensor<T> & gx = g.grad_of(ib);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] -= gy[i];
    }
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b)
{
  require_same_graph(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor<T> y = a.value();
  const Tensor<T> & B = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().emit(std::move(y), any_grad(a, b), [ia, ib](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    const Tensor<T> & A = g.value(ia);
    const Tensor<T> & B = g.value(ib);
    if (g.requires_grad(ia)) {
      Tensor<T> & gx = g.grad_of(ia);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * B[i];
    }
    if (g.requires_grad(ib)) {
      Tensor<T> & gx = g.grad_of(ib);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * A[i];
    }
  });
}

template <typename T>
Var<T> div(Var<T> a, Var<T> b)
{
  require_same_graph(a, b);
  require_same_shape(a.value(), b.value(), "div");
  Tensor<T> y = a.value();
  const Tensor<T> & B = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().emit(std::move(y), any_grad(a, b), [ia, ib](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    const Tensor<T> & B = g.value(ib);
    const Tensor<T> & Y = g.value(self);
    if (g.requires_grad(ia)) {
      Tensor<T> & gx = g.grad_of(ia);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] / B[i];
    }
    if (g.requires_grad(ib)) {
      Tensor<T> & gx = g.grad_of(ib);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] -= gy[i] * Y[i] / B[i];
    }
  });
}

template <typename T>
Var<T> add_row(Var<T> a, Var<T> row)
{
  require_same_graph(a, row);
  const Tensor<T> & R = row.value();
  Tensor<T> y = a.value();
  if (R.rows() != 1 || R.cols() != y.cols()) {
    throw ShapeError("add_row: " + shape_string(y) + " + row " + shape_string(R));
  }
  for (std::size_t r = 0; r < y.rows(); ++r) {
    T * yr = y.row(r);
    for (std::size_t c = 0; c < y.cols(); ++c) yr[c] += R[c];
  }
  const std::size_t ia = a.id(), ir = row.id();
  return a.graph().emit(std::move(y), any_grad(a, row), [ia, ir](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    if (g.requires_grad(ia)) {
      Tensor<T> & gx = g.grad_of(ia);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
    if (g.requires_grad(ir)) {
      Tensor<T> & gr = g.grad_of(ir);
      for (std::size_t r = 0; r < gy.rows(); ++r) {
        const T * src = gy.row(r);
        for (std::size_t c = 0; c < gy.cols(); ++c) gr[c] += src[c];
      }
    }
  });
}

template <typename T>
Var<T> scale(Var<T> a, T factor)
{
  return unary<T>(a, [factor](T x) { return x * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Var<T> add_scalar(Var<T> a, T offset)
{
  return unary<T>(a, [offset](T x) { return x + offset; }, [](T, T) { return T{1}; });
}

template <typename T>
Var<T> relu(Var<T> a)
{
  return unary<T>(
    a, [](T x) { return x > T{0} ? x : T{0}; }, [](T x, T) { return x > T{0} ? T{1} : T{0}; });
}

template <typename T>
Var<T> exp(Var<T> a)
{
  return unary<T>(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Var<T> square(Var<T> a)
{
  return unary<T>(a, [](T x) { return x * x; }, [](T x, T) { return T{2} * x; });
}

template <typename T>
Var<T> sqrt(Var<T> a)
{
  for (T v : a.value().values()) {
    if (!(v >= T{0})) throw std::domain_error("sqrt: negative input");
  }
  return unary<T>(
    a, [](T x) { return std::sqrt(x); },
    [](T, T y) { return y > T{0} ? T{0.5} / y : T{0}; });
}

template <typename T>
Var<T> clamp(Var<T> a, T lo, T hi)
{
  return unary<T>(
    a, [lo, hi](T x) { return std::clamp(x, lo, hi); },
    [lo, hi](T x, T) { return (x >= lo && x <= hi) ? T{1} : T{0}; });
}

template <typename T>
Var<T> softmax_rows(Var<T> a, const Tensor<T> * additive_mask)
{
  const Tensor<T> & X = a.value();
  if (additive_mask != nullptr) require_same_shape(X, *additive_mask, "softmax mask");
  Tensor<T> Y(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const T * x = X.row(r);
    T * y = Y.row(r);
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t c = 0; c < X.cols(); ++c) {
      y[c] = x[c] + (additive_mask != nullptr ? (*additive_mask)(r, c) : T{0});
      mx = std::max(mx, y[c]);
    }
    if (!std::isfinite(mx)) {
      // Fully masked row: no attention mass anywhere.
      std::fill(y, y + X.cols(), T{0});
      continue;
    }
    T total{};
    for (std::size_t c = 0; c < X.cols(); ++c) {
      y[c] = std::exp(y[c] - mx);
      total += y[c];
    }
    for (std::size_t c = 0; c < X.cols(); ++c) y[c] /= total;
  }
  const std::size_t ia = a.id();
  return a.graph().emit(std::move(Y), any_grad(a), [ia](Graph<T> & g, std::size_t self) {
    const Tensor<T> & Y = g.value(self);
    const Tensor<T> & gy = g.grad_of(self);
    Tensor<T> & gx = g.grad_of(ia);
    for (std::size_t r = 0; r < Y.rows(); ++r) {
      const T * y = Y.row(r);
      const T * dy = gy.row(r);
      T dot{};
      for (std::size_t c = 0; c < Y.cols(); ++c) dot += dy[c] * y[c];
      T * dx = gx.row(r);
      for (std::size_t c = 0; c < Y.cols(); ++c) dx[c] += y[c] * (dy[c] - dot);
    }
  });
}

template <typename T>
Var<T> layer_norm(Var<T> a, Var<T> gain, Var<T> bias, T eps)
{
  require_same_graph(a, gain);
  require_same_graph(a, bias);
  const Tensor<T> & X = a.value();
  const Tensor<T> & G = gain.value();
  const Tensor<T> & B = bias.value();
  const std::size_t n = X.cols();
  if (G.rows() != 1 || G.cols() != n || !G.same_shape(B)) {
    throw ShapeError("layer_norm: input " + shape_string(X) + ", gain " + shape_string(G));
  }
  Tensor<T> xhat(X.rows(), n);
  std::vector<T> inv_std(X.rows());
  Tensor<T> Y(X.rows(), n);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const T * x = X.row(r);
    T mu{};
    for (std::size_t c = 0; c < n; ++c) mu += x[c];
    mu /= static_cast<T>(n);
    T var{};
    for (std::size_t c = 0; c < n; ++c) var += (x[c] - mu) * (x[c] - mu);
    var /= static_cast<T>(n);
    const T inv = T{1} / std::sqrt(var + eps);
    inv_std[r] = inv;
    for (std::size_t c = 0; c < n; ++c) {
      xhat(r, c) = (x[c] - mu) * inv;
      Y(r, c) = xhat(r, c) * G[c] + B[c];
    }
  }
  const std::size_t ia = a.id(), igain = gain.id(), ibias = bias.id();
  return a.graph().emit(
    std::move(Y), any_grad(a) || any_grad(gain) || any_grad(bias),
    [ia, igain, ibias, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](
      Graph<T> & g, std::size_t self) {
      const Tensor<T> & gy = g.grad_of(self);
      const Tensor<T> & G = g.value(igain);
      if (g.requires_grad(igain)) {
        Tensor<T> & dg = g.grad_of(igain);
        for (std::size_t r = 0; r < gy.rows(); ++r)
          for (std::size_t c = 0; c < n; ++c) dg[c] += gy(r, c) * xhat(r, c);
      }
      if (g.requires_grad(ibias)) {
        Tensor<T> & db = g.grad_of(ibias);
        for (std::size_t r = 0; r < gy.rows(); ++r)
          for (std::size_t c = 0; c < n; ++c) db[c] += gy(r, c);
      }
      if (g.requires_grad(ia)) {
        Tensor<T> & dx = g.grad_of(ia);
        const T nn = static_cast<T>(n);
        for (std::size_t r = 0; r < gy.rows(); ++r) {
          T sum_d{}, sum_dx{};
          for (std::size_t c = 0; c < n; ++c) {
            const T d = gy(r, c) * G[c];
            sum_d += d;
            sum_dx += d * xhat(r, c);
          }
          for (std::size_t c = 0; c < n; ++c) {
            const T d = gy(r, c) * G[c];
            dx(r, c) += inv_std[r] / nn * (nn * d - sum_d - xhat(r, c) * sum_dx);
          }
        }
      }
    });
}

template <typename T>
Var<T> slice_cols(Var<T> a, std::size_t begin, std::size_t end)
{
  const Tensor<T> & X = a.value();
  if (begin > end || end > X.cols()) {
    throw ShapeError(
      "slice_cols [" + std::to_string(begin) + ", " + std::to_string(end) + ") of " +
      shape_string(X));
  }
  const std::size_t w = end - begin;
  Tensor<T> Y(X.rows(), w);
  for (std::size_t r = 0; r < X.rows(); ++r) std::copy_n(X.row(r) + begin, w, Y.row(r));
  const std::size_t ia = a.id();
  return a.graph().emit(std::move(Y), any_grad(a), [ia, begin, w](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    Tensor<T> & gx = g.grad_of(ia);
    for (std::size_t r = 0; r < gy.rows(); ++r) {
      T * dst = gx.row(r) + begin;
      const T * src = gy.row(r);
      for (std::size_t c = 0; c < w; ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>> & parts)
{
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  bool grad = false;
  for (const auto & p : parts) {
    require_same_graph(parts.front(), p);
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.cols();
    grad = grad || any_grad(p);
  }
  Tensor<T> Y(rows, cols);
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const auto & p : parts) {
    const Tensor<T> & X = p.value();
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(X.row(r), X.cols(), Y.row(r) + off);
    ids.push_back(p.id());
    offsets.push_back(off);
    off += X.cols();
  }
  return parts.front().graph().emit(
    std::move(Y), grad, [ids = std::move(ids), offsets = std::move(offsets)](Graph<T> & g, std::size_t self) {
      const Tensor<T> & gy = g.grad_of(self);
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!g.requires_grad(ids[k])) continue;
        Tensor<T> & gx = g.grad_of(ids[k]);
        for (std::size_t r = 0; r < gx.rows(); ++r) {
          const T * src = gy.row(r) + offsets[k];
          T * dst = gx.row(r);
          for (std::size_t c = 0; c < gx.cols(); ++c) dst[c] += src[c];
        }
      }
    });
}

template <typename T>
Var<T> gather_rows(Var<T> a, std::vector<std::size_t> index)
{
  const Tensor<T> & X = a.value();
  Tensor<T> Y(index.size(), X.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= X.rows()) {
      throw ShapeError(
        "gather_rows: index " + std::to_string(index[i]) + " out of " + std::to_string(X.rows()));
    }
    std::copy_n(X.row(index[i]), X.cols(), Y.row(i));
  }
  const std::size_t ia = a.id();
  return a.graph().emit(std::move(Y), any_grad(a), [ia, index = std::move(index)](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    Tensor<T> & gx = g.grad_of(ia);
    for (std::size_t i = 0; i < index.size(); ++i) {
      T * dst = gx.row(index[i]);
      const T * src = gy.row(i);
      for (std::size_t c = 0; c < gy.cols(); ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>> & parts)
{
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  bool grad = false;
  for (const auto & p : parts) {
    require_same_graph(parts.front(), p);
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.rows();
    grad = grad || any_grad(p);
  }
  Tensor<T> Y(rows, cols);
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const auto & p : parts) {
    const auto src = p.value().values();
    std::copy(src.begin(), src.end(), Y.row(off));
    ids.push_back(p.id());
    offsets.push_back(off);
    off += p.rows();
  }
  return parts.front().graph().emit(
    std::move(Y), grad, [ids = std::move(ids), offsets = std::move(offsets)](Graph<T> & g, std::size_t self) {
      const Tensor<T> & gy = g.grad_of(self);
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!g.requires_grad(ids[k])) continue;
        Tensor<T> & gx = g.grad_of(ids[k]);
        const T * src = gy.row(offsets[k]);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += src[i];
      }
    });
}

template <typename T>
Var<T> row_sum(Var<T> a)
{
  const Tensor<T> & X = a.value();
  Tensor<T> Y(X.rows(), 1);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const T * x = X.row(r);
    T acc{};
    for (std::size_t c = 0; c < X.cols(); ++c) acc += x[c];
    Y[r] = acc;
  }
  const std::size_t ia = a.id();
  return a.graph().emit(std::move(Y), any_grad(a), [ia](Graph<T> & g, std::size_t self) {
    const Tensor<T> & gy = g.grad_of(self);
    Tensor<T> & gx = g.grad_of(ia);
    for (std::size_t r = 0; r < gx.rows(); ++r) {
      T * dst = gx.row(r);
      for (std::size_t c = 0; c < gx.cols(); ++c) dst[c] += gy[r];
    }
  });
}

template <typename T>
Var<T> sum(Var<T> a)
{
  const Tensor<T> & X = a.value();
  T acc{};
  for (const T v : X.values()) acc += v;
  const std::size_t ia = a.id();
  return a.graph().emit(Tensor<T>(1, 1, acc), any_grad(a), [ia](Graph<T> & g, std::size_t self) {
    const T gy = g.grad_of(self)[0];
    for (auto & v : g.grad_of(ia).values()) v += gy;
  });
}

template <typename T>
Var<T> mean(Var<T> a)
{
  const std::size_t n = a.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), T{1} / static_cast<T>(n));
}

template <typename T>
Var<T> linear(Var<T> x, Var<T> weight, Var<T> bias)
{
  return add_row(matmul(x, weight), bias);
}

template <typename T>
Var<T> dropout(Var<T> a, T rate, std::mt19937_64 & rng)
{
  if (rate <= T{0}) return a;
  if (rate >= T{1}) throw std::invalid_argument("dropout rate must be below 1");
  const Tensor<T> & X = a.value();
  Tensor<T> keep(X.rows(), X.cols());
  std::bernoulli_distribution draw(1.0 - static_cast<double>(rate));
  const T s = T{1} / (T{1} - rate);
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = draw(rng) ? s : T{0};
  return mul(a, a.graph().constant(std::move(keep)));
}

#define SOCREC_INSTANTIATE(T)                                                        \
  template class ParameterStore<T>;                                                  \
  template class GradientBuffer<T>;                                                  \
  template class Graph<T>;                                                           \
  template Var<T> matmul(Var<T>, Var<T>);                                            \
  template Var<T> matmul_nt(Var<T>, Var<T>);                                         \
  template Var<T> add(Var<T>, Var<T>);                                               \
  template Var<T> sub(Var<T>, Var<T>);                                               \
  template Var<T> mul(Var<T>, Var<T>);                                               \
  template Var<T> div(Var<T>, Var<T>);                                               \
  template Var<T> add_row(Var<T>, Var<T>);                                           \
  template Var<T> scale(Var<T>, T);                                                  \
  template Var<T> add_scalar(Var<T>, T);                                             \
  template Var<T> relu(Var<T>);                                                      \
  template Var<T> exp(Var<T>);                                                       \
  template Var<T> square(Var<T>);                                                    \
  template Var<T> sqrt(Var<T>);                                                      \
  template Var<T> clamp(Var<T>, T, T);                                               \
  template Var<T> softmax_rows(Var<T>, const Tensor<T> *);                           \
  template Var<T> layer_norm(Var<T>, Var<T>, Var<T>, T);                             \
  template Var<T> slice_cols(Var<T>, std::size_t, std::size_t);                      \
  template Var<T> concat_cols(const std::vector<Var<T>> &);                          \
  template Var<T> gather_rows(Var<T>, std::vector<std::size_t>);                     \
  template Var<T> concat_rows(const std::vector<Var<T>> &);                          \
  template Var<T> row_sum(Var<T>);                                                   \
  template Var<T> sum(Var<T>);                                                       \
  template Var<T> mean(Var<T>);                                                      \
  template Var<T> linear(Var<T>, Var<T>, Var<T>);                                    \
  template Var<T> dropout(Var<T>, T, std::mt19937_64 &);

SOCREC_INSTANTIATE(float)
SOCREC_INSTANTIATE(double)

#undef SOCREC_INSTANTIATE

}  // namespace socrec::nn
