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

#include "aesn/optim.h"

#include <cmath>

#include "aesn/error.h"

namespace aesn {

void AdamUpdate(Tensor& param, std::span<const double> grad, double grad_scale,
                AdamMoments& moments, size_t t, const AdamOptions& options) {
  size_t n = param.size();
  if (grad.size() != n) throw ShapeError("adam: gradient size mismatch");
  if (moments.m.size() != n) {
    moments.m.assign(n, 0.0);
    moments.v.assign(n, 0.0);
  }
  const double b1 = options.beta1, b2 = options.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  double* theta = param.ptr();
  for (size_t k = 0; k < n; ++k) {
    double g = grad[k] * grad_scale;
    moments.m[k] = b1 * moments.m[k] + (1.0 - b1) * g;
    moments.v[k] = b2 * moments.v[k] + (1.0 - b2) * g * g;
    double m_hat = moments.m[k] / c1;
    double v_hat = moments.v[k] / c2;
    theta[k] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
  }
}

void Adam::Step(ParamRegistry& params, double grad_scale) {
  for (size_t i = 0; i < params.size(); ++i) {
    const Tensor& p = params.at(i);
    if (p.trainable() && p.tracked() && !p.GradFinite())
      throw NumericError("non-finite gradient in parameter '" + params.name(i) + "'");
  }
  if (moments_.size() < params.size()) moments_.resize(params.size());
  ++step_;
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params.at(i);
    if (!p.trainable() || !p.tracked()) continue;
    AdamUpdate(p, p.grad(), grad_scale, moments_[i], step_, options_);
  }
}

}  // namespace aesn
