// Copyright 2026 The cifscd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cifscd/errors.hpp"

namespace cifscd {

// Dense row-major array of doubles, rank 1 or 2. Rank-1 tensors behave as a
// single column for row/column queries.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)) {
    Require(!shape_.empty() && shape_.size() <= 2, ErrorCode::kShapeMismatch,
            "tensor rank must be 1 or 2");
    values_.assign(NumElements(shape_), fill);
  }

  Tensor(std::vector<std::size_t> shape, std::vector<double> values)
      : shape_(std::move(shape)), values_(std::move(values)) {
    Require(!shape_.empty() && shape_.size() <= 2, ErrorCode::kShapeMismatch,
            "tensor rank must be 1 or 2");
    Require(values_.size() == NumElements(shape_), ErrorCode::kShapeMismatch,
            "value count does not match shape");
  }

  static Tensor Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }

  static Tensor FromRows(const std::vector<std::vector<double>>& rows) {
    Require(!rows.empty(), ErrorCode::kShapeMismatch, "no rows");
    Tensor t = Matrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Require(rows[i].size() == t.cols(), ErrorCode::kShapeMismatch,
              "ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), t.row(i).begin());
    }
    return t;
  }

  static Tensor Vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() == 2 ? shape_[1] : 1; }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  std::string ShapeString() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(shape_[i]);
    }
    return s + "]";
  }

  static std::size_t NumElements(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

// Row view adapter so a Tensor can be fed to the CIF integrator like any
// other frame sequence.
class TensorRows {
 public:
  explicit TensorRows(const Tensor& t) : t_(&t) {}
  std::size_t size() const { return t_->rows(); }
  std::span<const double> operator[](std::size_t i) const { return t_->row(i); }

 private:
  const Tensor* t_;
};

}  // namespace cifscd
