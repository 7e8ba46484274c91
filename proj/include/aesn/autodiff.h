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

// Reverse-mode automatic differentiation over rank-2 tensors.
//
// A Graph is an append-only tape. Every operation appends a node holding its
// forward value and a closure that, given the node's upstream gradient, adds
// the contributions into its inputs' gradients. Nodes are created in
// topological order, so Backward() simply walks the tape in reverse.
//
// Gradients accumulate (+=): a value consumed twice receives the sum of both
// path gradients, and parameter gradients keep accumulating across graphs until
// ParamRegistry::ZeroGrad().

#ifndef AESN_AUTODIFF_H_
#define AESN_AUTODIFF_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "aesn/tensor.h"

namespace aesn::ad {

class Graph;

// Handle to a node in a Graph. Cheap to copy; valid while the graph lives.
struct Var {
  Graph* graph = nullptr;
  size_t id = 0;

  const Tensor& value() const;
  size_t rows() const { return value().rows(); }
  size_t cols() const { return value().cols(); }
  double scalar() const;
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(Tensor value);
  // Leaf holding a copy of `p`; its gradient is added into p.grad() when p is
  // tracked.
  Var Param(Tensor& p);
  // Appends a node; used by op implementations. `backward` may be empty for
  // nodes that do not propagate.
  Var AddNode(Tensor value, BackwardFn backward);

  const Tensor& value(size_t id) const { return nodes_[id].value; }
  // Gradient buffer of a node, allocated on first use.
  std::span<double> grad(size_t id);
  bool has_grad(size_t id) const { return !nodes_[id].grad.empty(); }

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  // `loss` must be [1, 1].
  void Backward(Var loss);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    BackwardFn backward;
  };
  std::deque<Node> nodes_;
};

// ---- Operations. Shape mismatches throw ShapeError naming both shapes. ----

Var MatMul(Var a, Var b);    // [m,k]·[k,p] -> [m,p]
Var MatMulNT(Var a, Var b);  // [m,k]·[p,k]ᵀ -> [m,p]
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);  // elementwise
Var Scale(Var a, double c);
// alpha * a + beta, elementwise.
Var Affine(Var a, double alpha, double beta);
// Adds a [1, c] row to every row of a [r, c] matrix.
Var AddRow(Var a, Var row);
Var Sigmoid(Var a);
Var Tanh(Var a);
Var Relu(Var a);
// Row-wise softmax with max subtraction.
Var SoftmaxRows(Var a);
// Row-wise log-sum-exp: [r, c] -> [r, 1].
Var LogSumExpRows(Var a);
// Sum of all entries -> [1, 1].
Var Sum(Var a);
Var ConcatCols(std::span<const Var> xs);
Var ConcatRows(std::span<const Var> xs);
Var SliceCols(Var a, size_t begin, size_t count);
Var SliceRows(Var a, size_t begin, size_t count);
// Inverted dropout: kept entries are scaled by 1/(1-rate). Identity when
// rate == 0.
Var Dropout(Var a, double rate, Rng& rng);
// Gathers rows of `table` by id -> [ids.size(), table.cols()]. Gradients
// scatter-add into table.grad() without copying the table into the graph.
Var Lookup(Graph& g, Tensor& table, std::span<const int> ids);
// Per-row layer normalization with [1, c] gain and bias.
Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
// Relative-offset gather. `a` is [r, 2n-1] with column k holding offset
// k - (n-1); returns [n, n] with out[i][j] = a[i or 0][i - j + n - 1]. A single
// row is broadcast over all i.
Var RelShift(Var a, size_t n);

// ---- Finite-difference oracle. ----

struct GradCheckOptions {
  double h = 1e-5;
  // Coordinates probed per tensor; 0 probes all of them. Sampled coordinates
  // are drawn with `seed`.
  size_t max_coords_per_tensor = 0;
  uint64_t seed = 1;
  // Lower bound on the relative-error denominator. A loss of order 10 is
  // resolved to about 2e-15, so at h = 1e-5 the difference quotient carries
  // about 1e-10 of absolute noise; gradients far below 1e-5 cannot be
  // checked to a relative 1e-4.
  double denominator_floor = 1e-5;
};

// Compares backprop gradients of the scalar built by `build` against central
// differences (f(θ+h) - f(θ-h)) / 2h for every listed tensor. Returns the max
// relative error |a - n| / max(denominator_floor, |a| + |n|). Parameter
// gradients are zeroed before and after.
double FiniteDiffCheck(const std::function<Var(Graph&)>& build,
                       std::span<Tensor* const> params,
                       const GradCheckOptions& options = {});

}  // namespace aesn::ad

#endif  // AESN_AUTODIFF_H_
