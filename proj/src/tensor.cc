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

#include "aesn/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "aesn/error.h"

namespace aesn {

Tensor::Tensor(std::vector<size_t> shape, double fill) : shape_(std::move(shape)) {
  size_t n = std::accumulate(shape_.begin(), shape_.end(), size_t{1},
                             std::multiplies<size_t>());
  data_.assign(n, fill);
}

Tensor Tensor::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  size_t r = rows.size();
  size_t c = r ? rows.begin()->size() : 0;
  Tensor t(r, c);
  size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("FromRows: ragged rows");
    for (double v : row) t.data_[i++] = v;
  }
  return t;
}

Tensor Tensor::Row(std::span<const double> values) {
  Tensor t(1, values.size());
  std::copy(values.begin(), values.end(), t.data_.begin());
  return t;
}

void Tensor::ZeroGrad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool Tensor::GradFinite() const {
  return std::all_of(grad_.begin(), grad_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  std::string s = "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

Tensor& ParamRegistry::Add(const std::string& name, std::vector<size_t> shape) {
  if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
  auto t = std::make_unique<Tensor>(std::move(shape));
  t->EnableGrad();
  index_[name] = entries_.size();
  entries_.push_back({name, std::move(t)});
  return *entries_.back().tensor;
}

Tensor& ParamRegistry::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
  return *entries_[it->second].tensor;
}

const Tensor& ParamRegistry::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
  return *entries_[it->second].tensor;
}

void ParamRegistry::ZeroGrad() {
  for (auto& e : entries_) e.tensor->ZeroGrad();
}

size_t ParamRegistry::ParameterCount() const {
  size_t n = 0;
  for (const auto& e : entries_) n += e.tensor->size();
  return n;
}

void InitGlorot(Tensor& t, Rng& rng) {
  double fan_in = static_cast<double>(t.cols());
  double fan_out = static_cast<double>(t.rows());
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.data()) v = dist(rng);
}

void InitNormal(Tensor& t, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : t.data()) v = dist(rng);
}

}  // namespace aesn
