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

#ifndef AESN_OPTIM_H_
#define AESN_OPTIM_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aesn/tensor.h"

namespace aesn {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

// Moment estimates of one parameter tensor.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
};

// Adam with bias correction. One state per registry; the step counter is
// shared by all parameters.
class Adam {
 public:
  explicit Adam(AdamOptions options) : options_(options) {}

  // Applies one update from the accumulated gradients scaled by
  // `grad_scale`. Frozen parameters are skipped. Throws NumericError naming
  // the first parameter with a non-finite gradient, before anything changes.
  void Step(ParamRegistry& params, double grad_scale = 1.0);

  size_t steps() const { return step_; }
  const AdamMoments& moments(size_t param_index) const { return moments_.at(param_index); }

 private:
  AdamOptions options_;
  size_t step_ = 0;
  std::vector<AdamMoments> moments_;
};

// The update of a single tensor at step `t` (1-based).
void AdamUpdate(Tensor& param, std::span<const double> grad, double grad_scale,
                AdamMoments& moments, size_t t, const AdamOptions& options);

}  // namespace aesn

#endif  // AESN_OPTIM_H_
