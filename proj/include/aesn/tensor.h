// Copyright 2026 The AESN Authors. All Rights Reserved.
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

#ifndef AESN_TENSOR_H_
#define AESN_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace aesn {

using Rng = std::mt19937_64;

// Dense row-major array of doubles. Graph operations use rank-2 tensors only
// (vectors are [1, d] rows); higher ranks are storable but not computable.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, double fill = 0.0);
  Tensor(size_t rows, size_t cols, double fill = 0.0)
      : Tensor(std::vector<size_t>{rows, cols}, fill) {}

  // Builds a [rows.size(), cols] matrix from nested initializer lists.
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Row(std::span<const double> values);

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  // Rank-1 tensors read as a single row.
  size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
  size_t cols() const {
    return shape_.empty() ? 0 : shape_.size() == 2 ? shape_[1] : shape_[0];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double* ptr() { return data_.data(); }
  const double* ptr() const { return data_.data(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols() + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols() + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  // Gradient accumulator; empty until EnableGrad().
  bool tracked() const { return !grad_.empty(); }
  void EnableGrad() { grad_.assign(data_.size(), 0.0); }
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }
  void ZeroGrad();

  // Frozen tensors keep a gradient but are skipped by optimizers.
  bool trainable() const { return trainable_; }
  void set_trainable(bool v) { trainable_ = v; }

  bool AllFinite() const;
  bool GradFinite() const;

  std::string ShapeString() const;

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
  bool trainable_ = true;
};

// Named registry of trainable tensors. Iteration follows registration order.
class ParamRegistry {
 public:
  ParamRegistry() = default;
  ParamRegistry(const ParamRegistry&) = delete;
  ParamRegistry& operator=(const ParamRegistry&) = delete;

  // Registers a zero-initialized tracked tensor. Throws ConfigError on a
  // duplicate name.
  Tensor& Add(const std::string& name, std::vector<size_t> shape);

  Tensor& Get(const std::string& name);
  const Tensor& Get(const std::string& name) const;
  bool Contains(const std::string& name) const { return index_.count(name) > 0; }

  size_t size() const { return entries_.size(); }
  const std::string& name(size_t i) const { return entries_[i].name; }
  Tensor& at(size_t i) { return *entries_[i].tensor; }
  const Tensor& at(size_t i) const { return *entries_[i].tensor; }

  void ZeroGrad();
  size_t ParameterCount() const;

 private:
  struct Entry {
    std::string name;
    std::unique_ptr<Tensor> tensor;
  };
  std::vector<Entry> entries_;
  std::map<std::string, size_t> index_;
};

// Initializers. Glorot-uniform over (fan_in = cols, fan_out = rows).
void InitGlorot(Tensor& t, Rng& rng);
void InitNormal(Tensor& t, double stddev, Rng& rng);

}  // namespace aesn

#endif  // AESN_TENSOR_H_
