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

#include "aesn/autodiff.h"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "aesn/error.h"
#include "test_util.h"

namespace aesn::ad {
namespace {

using testing::RandomTensor;

constexpr double kTol = 1e-4;

// Weighted sum so every output coordinate carries a distinct upstream gradient.
Var Probe(Graph& g, Var x, const Tensor& weights) {
  return Sum(Mul(x, g.Constant(weights)));
}

double CheckUnary(const std::function<Var(Var)>& op, Tensor input, uint64_t seed = 3) {
  Rng rng(seed);
  Tensor x = std::move(input);
  x.EnableGrad();
  Graph probe_graph;
  Tensor w = RandomTensor(op(probe_graph.Param(x)).rows(), op(probe_graph.Param(x)).cols(), rng);
  Tensor* params[] = {&x};
  return FiniteDiffCheck([&](Graph& g) { return Probe(g, op(g.Param(x)), w); }, params);
}

TEST_CASE("matrix products") {
  Graph g;
  Var a = g.Constant(Tensor::FromRows({{1, 2}, {3, 4}}));
  Var b = g.Constant(Tensor::FromRows({{1}, {1}}));
  Var c = MatMul(a, b);
  CHECK(c.rows() == 2);
  CHECK(c.value()(0, 0) == 3);
  CHECK(c.value()(1, 0) == 7);
  Var eye = g.Constant(Tensor::FromRows({{1, 0}, {0, 1}}));
  CHECK(MatMul(a, eye).value().data()[3] == 4);
  CHECK(MatMulNT(a, a).value()(0, 1) == 11);
  CHECK_THROWS_AS(MatMul(a, g.Constant(Tensor(3, 1))), ShapeError);
}

TEST_CASE("gradient of sum(A B) with respect to A is ones times B transposed") {
  Rng rng(5);
  Tensor a = RandomTensor(2, 3, rng), b = RandomTensor(3, 4, rng);
  a.EnableGrad();
  Graph g;
  g.Backward(Sum(MatMul(g.Param(a), g.Constant(b))));
  for (size_t i = 0; i < 2; ++i)
    for (size_t k = 0; k < 3; ++k) {
      double expect = 0.0;
      for (size_t j = 0; j < 4; ++j) expect += b(k, j);
      CHECK(a.grad()[i * 3 + k] == doctest::Approx(expect).epsilon(1e-12));
    }
  Tensor* params[] = {&a};
  CHECK(FiniteDiffCheck([&](Graph& h) { return Sum(MatMul(h.Param(a), h.Constant(b))); }, params) <
        kTol);
}

TEST_CASE("softmax") {
  Graph g;
  Var s = SoftmaxRows(g.Constant(Tensor::FromRows({{0, 0}})));
  CHECK(s.value()[0] == doctest::Approx(0.5));
  Var big = SoftmaxRows(g.Constant(Tensor::FromRows({{1000, 0}})));
  CHECK(big.value()[0] == doctest::Approx(1.0));
  CHECK(big.value()[1] >= 0.0);
  CHECK(big.value().AllFinite());
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    Tensor x = RandomTensor(1, 6, rng, 3.0);
    Tensor shifted = x;
    for (double& v : shifted.data()) v += 17.5;
    Var p = SoftmaxRows(g.Constant(x));
    Var q = SoftmaxRows(g.Constant(shifted));
    double total = 0.0;
    for (size_t k = 0; k < 6; ++k) {
      total += p.value()[k];
      CHECK(std::abs(p.value()[k] - q.value()[k]) < 1e-12);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("sigmoid") {
  Graph g;
  Var s = Sigmoid(g.Constant(Tensor::FromRows({{0, 3, -3, 800, -800}})));
  const Tensor& v = s.value();
  CHECK(v[0] == 0.5);
  CHECK(std::abs(v[1] + v[2] - 1.0) < 1e-12);
  CHECK(v.AllFinite());
  CHECK(v[3] == doctest::Approx(1.0));
  CHECK(v[4] >= 0.0);
  Rng rng(9);
  CHECK(CheckUnary([](Var x) { return Sigmoid(x); }, RandomTensor(3, 4, rng)) < kTol);
  // Analytic derivative at a few points.
  Tensor x = Tensor::FromRows({{-2.0, 0.3, 1.7}});
  x.EnableGrad();
  Graph h;
  h.Backward(Sum(Sigmoid(h.Param(x))));
  for (size_t k = 0; k < 3; ++k) {
    double sig = 1.0 / (1.0 + std::exp(-x[k]));
    CHECK(x.grad()[k] == doctest::Approx(sig * (1 - sig)).epsilon(1e-12));
  }
}

TEST_CASE("concatenation") {
  Graph g;
  Var a = g.Constant(Tensor::FromRows({{1}}));
  Var b = g.Constant(Tensor::FromRows({{2}}));
  Var ab[] = {a, b};
  Var c = ConcatCols(ab);
  CHECK(c.cols() == 2);
  CHECK(c.value()[1] == 2);
  Var single[] = {a};
  CHECK(ConcatCols(single).value()[0] == 1);
  Var rows = ConcatRows(ab);
  CHECK(rows.rows() == 2);

  Rng rng(4);
  Tensor x = RandomTensor(2, 3, rng), y = RandomTensor(2, 2, rng);
  x.EnableGrad();
  y.EnableGrad();
  Tensor w = RandomTensor(2, 5, rng);
  Tensor* params[] = {&x, &y};
  CHECK(FiniteDiffCheck(
            [&](Graph& h) {
              Var parts[] = {h.Param(x), h.Param(y)};
              return Probe(h, ConcatCols(parts), w);
            },
            params) < kTol);
  // The upstream gradient is split by segment.
  Graph h;
  Var parts[] = {h.Param(x), h.Param(y)};
  h.Backward(Probe(h, ConcatCols(parts), w));
  CHECK(x.grad()[4] == w(1, 1));
  CHECK(y.grad()[1] == w(0, 4));
}

TEST_CASE("parameter gradients accumulate") {
  Tensor p = Tensor::FromRows({{1, 2, 3}});
  p.EnableGrad();
  Graph g;
  g.Backward(Sum(g.Param(p)));
  for (double v : p.grad()) CHECK(v == 1.0);
  Graph g2;
  Var x = g2.Param(p);
  g2.Backward(Sum(Add(x, Scale(x, 2.0))));  // two consumers
  for (double v : p.grad()) CHECK(v == 4.0);
  p.ZeroGrad();
  for (double v : p.grad()) CHECK(v == 0.0);
}

TEST_CASE("backward needs a scalar") {
  Graph g;
  Var x = g.Constant(Tensor(2, 2));
  CHECK_THROWS_AS(g.Backward(x), ShapeError);
}

TEST_CASE("finite differences on textbook functions") {
  Tensor theta = Tensor::FromRows({{3.0}});
  theta.EnableGrad();
  Graph g;
  Var t = g.Param(theta);
  g.Backward(Sum(Mul(t, t)));
  CHECK(theta.grad()[0] == doctest::Approx(6.0).epsilon(1e-12));
  Tensor* params[] = {&theta};
  theta.ZeroGrad();
  CHECK(FiniteDiffCheck([&](Graph& h) { Var v = h.Param(theta); return Sum(Mul(v, v)); }, params) <
        1e-7);
  CHECK(FiniteDiffCheck([&](Graph& h) { return Sum(Affine(h.Param(theta), 4.0, 1.0)); }, params) <
        1e-9);
}

TEST_CASE("finite differences on every op") {
  Rng rng(21);
  auto input = [&](size_t r, size_t c) { return RandomTensor(r, c, rng); };
  CHECK(CheckUnary([](Var x) { return Tanh(x); }, input(3, 4)) < kTol);
  CHECK(CheckUnary([](Var x) { return Relu(x); }, input(3, 4)) < kTol);
  CHECK(CheckUnary([](Var x) { return SoftmaxRows(x); }, input(3, 5)) < kTol);
  CHECK(CheckUnary([](Var x) { return LogSumExpRows(x); }, input(3, 5)) < kTol);
  CHECK(CheckUnary([](Var x) { return Scale(x, -1.5); }, input(2, 2)) < kTol);
  CHECK(CheckUnary([](Var x) { return Affine(x, -1.0, 1.0); }, input(2, 2)) < kTol);
  CHECK(CheckUnary([](Var x) { return SliceCols(x, 1, 2); }, input(3, 4)) < kTol);
  CHECK(CheckUnary([](Var x) { return SliceRows(x, 1, 2); }, input(3, 4)) < kTol);
  CHECK(CheckUnary([](Var x) { return Mul(x, x); }, input(2, 3)) < kTol);
  CHECK(CheckUnary([](Var x) { return Sub(x, Sigmoid(x)); }, input(2, 3)) < kTol);
  CHECK(CheckUnary([](Var x) { return MatMulNT(x, x); }, input(3, 2)) < kTol);
  CHECK(CheckUnary([](Var x) { return RelShift(x, 3); }, input(3, 5)) < kTol);
  CHECK(CheckUnary([](Var x) { return RelShift(x, 3); }, input(1, 5)) < kTol);

  Tensor row = input(1, 4);
  row.EnableGrad();
  Tensor m = input(3, 4);
  m.EnableGrad();
  Tensor w = input(3, 4);
  Tensor* both[] = {&m, &row};
  CHECK(FiniteDiffCheck([&](Graph& g) { return Probe(g, AddRow(g.Param(m), g.Param(row)), w); },
                        both) < kTol);

  Tensor gain = input(1, 4), bias = input(1, 4);
  gain.EnableGrad();
  bias.EnableGrad();
  Tensor* ln[] = {&m, &gain, &bias};
  CHECK(FiniteDiffCheck(
            [&](Graph& g) {
              return Probe(g, LayerNorm(g.Param(m), g.Param(gain), g.Param(bias)), w);
            },
            ln) < kTol);
}

TEST_CASE("layer norm output is normalized") {
  Rng rng(8);
  Graph g;
  Tensor ones(1, 6, 1.0), zeros(1, 6, 0.0);
  Var y = LayerNorm(g.Constant(RandomTensor(2, 6, rng, 5.0)), g.Constant(ones), g.Constant(zeros));
  for (size_t r = 0; r < 2; ++r) {
    double mean = 0, var = 0;
    for (size_t c = 0; c < 6; ++c) mean += y.value()(r, c) / 6;
    for (size_t c = 0; c < 6; ++c) var += (y.value()(r, c) - mean) * (y.value()(r, c) - mean) / 6;
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("relative shift layout") {
  // Row i of the [n, 2n-1] input holds distances n-1 ... -(n-1).
  Graph g;
  Tensor a(1, 5);
  for (size_t k = 0; k < 5; ++k) a[k] = static_cast<double>(k);
  Var s = RelShift(g.Constant(a), 3);
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j) CHECK(s.value()(i, j) == static_cast<double>(i - j + 2));
}

TEST_CASE("lookup scatters gradients") {
  Tensor table = Tensor::FromRows({{1, 2}, {3, 4}, {5, 6}});
  table.EnableGrad();
  Graph g;
  std::vector<int> ids = {2, 0, 2};
  Var rows = Lookup(g, table, ids);
  CHECK(rows.value()(0, 1) == 6);
  g.Backward(Sum(rows));
  CHECK(table.grad()[4] == 2.0);
  CHECK(table.grad()[2] == 0.0);
  std::vector<int> bad = {3};
  CHECK_THROWS_AS(Lookup(g, table, bad), ShapeError);
  Tensor* params[] = {&table};
  Rng rng(1);
  Tensor w = RandomTensor(3, 2, rng);
  table.ZeroGrad();
  CHECK(FiniteDiffCheck([&](Graph& h) { return Probe(h, Lookup(h, table, ids), w); }, params) < kTol);
}

TEST_CASE("dropout") {
  Rng rng(3);
  Graph g;
  Tensor x(1, 2000, 1.0);
  Var same = Dropout(g.Constant(x), 0.0, rng);
  CHECK(same.value()[7] == 1.0);
  Var d = Dropout(g.Constant(x), 0.25, rng);
  size_t zeros = 0;
  double total = 0;
  for (double v : d.value().data()) {
    if (v == 0.0) ++zeros;
    else CHECK(v == doctest::Approx(1.0 / 0.75));
    total += v;
  }
  CHECK(zeros > 400);
  CHECK(zeros < 600);
  CHECK(total / 2000 == doctest::Approx(1.0).epsilon(0.05));
  Rng a(77), b(77);
  Graph g1, g2;
  CHECK(Dropout(g1.Constant(x), 0.5, a).value().data()[0] ==
        Dropout(g2.Constant(x), 0.5, b).value().data()[0]);
}

TEST_CASE("no NaN on large finite inputs") {
  Graph g;
  Tensor x = Tensor::FromRows({{1e6, -1e6, 0.0, 3e5}});
  Var v = g.Constant(x);
  CHECK(Sigmoid(v).value().AllFinite());
  CHECK(Tanh(v).value().AllFinite());
  CHECK(SoftmaxRows(v).value().AllFinite());
  CHECK(LogSumExpRows(v).value().AllFinite());
  CHECK(LogSumExpRows(v).value()[0] == doctest::Approx(1e6));
}

}  // namespace
}  // namespace aesn::ad
