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

#ifndef SOCREC__NN__TENSOR_HPP_
#define SOCREC__NN__TENSOR_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "socrec/errors.hpp"

namespace socrec::nn
{

/**
 * @brief Dense row-major matrix.
 *
 * Every quantity in the model is a matrix: sequences of tokens are rows,
 * features are columns. Higher-rank data (agents x timesteps x 2) is
 * flattened by the caller into time-major rows (row = t * N + agent).
 */
template <typename T>
class Tensor
{
public:
  using value_type = T;

  Tensor() = default;

  Tensor(std::size_t rows, std::size_t cols, T fill = T{})
  : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {
  }

  Tensor(std::size_t rows, std::size_t cols, std::vector<T> values)
  : rows_(rows), cols_(cols), data_(std::move(values))
  {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError(
        "tensor of " + std::to_string(rows_) + "x" + std::to_string(cols_) + " given " +
        std::to_string(data_.size()) + " values");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::array<std::size_t, 2> shape() const { return {rows_, cols_}; }
  bool empty() const { return data_.empty(); }

  bool same_shape(const Tensor & other) const
  {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  T & operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T & operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  T & operator[](std::size_t i) { return data_[i]; }
  const T & operator[](std::size_t i) const { return data_[i]; }

  T * row(std::size_t r) { return data_.data() + r * cols_; }
  const T * row(std::size_t r) const { return data_.data() + r * cols_; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const
  {
    for (const T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  template <typename U>
  Tensor<U> cast() const
  {
    Tensor<U> out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const Tensor & a, const Tensor & b)
  {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

inline std::string shape_string(std::size_t r, std::size_t c)
{
  return std::to_string(r) + "x" + std::to_string(c);
}

template <typename T>
std::string shape_string(const Tensor<T> & t)
{
  return shape_string(t.rows(), t.cols());
}

}  // namespace socrec::nn

#endif  // SOCREC__NN__TENSOR_HPP_
