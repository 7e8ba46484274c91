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

#include "aesn/ensemble.h"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "aesn/error.h"
#include "test_util.h"

namespace aesn {
namespace {

using ad::Graph;
using ad::Var;
using testing::RandomTensor;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST_CASE("kvmn over a single entry") {
  Tensor keys = Tensor::FromRows({{0.3, -0.2}}), values = Tensor::FromRows({{1.5, 2.5}});
  Graph g;
  std::vector<int> ids = {0};
  KvmnOutput out = KvmnForward(g, g.Constant(Tensor::FromRows({{4, 1}})), {&keys, &values}, ids, ids);
  CHECK(out.weights.value()[0] == 1.0);
  CHECK(out.summary.value()[0] == 1.5);
  CHECK(out.summary.value()[1] == 2.5);
}

TEST_CASE("kvmn with identical keys averages the values") {
  Tensor keys = Tensor::FromRows({{0.7, 0.1}}), values = Tensor::FromRows({{1, 0}, {0, 3}, {2, 3}});
  Graph g;
  std::vector<int> key_ids = {0, 0, 0}, value_ids = {0, 1, 2};
  KvmnOutput out =
      KvmnForward(g, g.Constant(Tensor::FromRows({{2, -1}})), {&keys, &values}, key_ids, value_ids);
  for (int j = 0; j < 3; ++j) CHECK(out.weights.value()[j] == doctest::Approx(1.0 / 3));
  CHECK(out.summary.value()[0] == doctest::Approx(1.0));
  CHECK(out.summary.value()[1] == doctest::Approx(2.0));
}

TEST_CASE("kvmn hand-computed softmax") {
  Tensor keys = Tensor::FromRows({{1, 0}, {0, 1}});
  Tensor values = Tensor::FromRows({{2, 0}, {0, 4}});
  Graph g;
  std::vector<int> ids = {0, 1};
  KvmnOutput out = KvmnForward(g, g.Constant(Tensor::FromRows({{1, 0}})), {&keys, &values}, ids, ids);
  double e = std::exp(1.0);
  double p0 = e / (e + 1), p1 = 1 / (e + 1);
  CHECK(out.weights.value()[0] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(out.weights.value()[1] == doctest::Approx(0.2689).epsilon(1e-4));
  CHECK(std::abs(out.weights.value()[0] - p0) < 1e-15);
  CHECK(std::abs(out.summary.value()[0] - 2 * p0) < 1e-15);
  CHECK(std::abs(out.summary.value()[1] - 4 * p1) < 1e-15);
}

TEST_CASE("kvmn input checks") {
  Tensor keys(3, 2), values(3, 2);
  Graph g;
  Var h = g.Constant(Tensor(1, 2));
  std::vector<int> none, one = {0}, two = {0, 1};
  CHECK_THROWS_AS(KvmnForward(g, h, {&keys, &values}, none, none), Error);
  CHECK_THROWS_AS(KvmnForward(g, h, {&keys, &values}, one, two), ShapeError);
  CHECK_THROWS_AS(KvmnForward(g, g.Constant(Tensor(1, 3)), {&keys, &values}, one, one), ShapeError);
}

TEST_CASE("kvmn is invariant to permuting the memory") {
  Rng rng(3);
  Tensor keys = RandomTensor(6, 4, rng), values = RandomTensor(6, 4, rng);
  Tensor h = RandomTensor(1, 4, rng);
  std::vector<int> k = {0, 3, 5, 2}, v = {1, 4, 2, 0};
  std::vector<int> order = {2, 0, 3, 1};
  std::vector<int> pk, pv;
  for (int o : order) {
    pk.push_back(k[o]);
    pv.push_back(v[o]);
  }
  Graph g;
  Tensor a = KvmnForward(g, g.Constant(h), {&keys, &values}, k, v).summary.value();
  Tensor b = KvmnForward(g, g.Constant(h), {&keys, &values}, pk, pv).summary.value();
  for (size_t c = 0; c < 4; ++c) CHECK(std::abs(a[c] - b[c]) < 1e-12);
}

TEST_CASE("direct concatenation keeps declared order") {
  Graph g;
  Var a = g.Constant(Tensor::FromRows({{1, 2, 3, 4}}));
  Var b = g.Constant(Tensor::FromRows({{5, 6, 7, 8}}));
  Var both[] = {a, b};
  Tensor out = DirectConcat(both).value();
  CHECK(out.cols() == 8);
  for (size_t k = 0; k < 8; ++k) CHECK(out[k] == static_cast<double>(k + 1));
  Var single[] = {a};
  CHECK(testing::SameValues(DirectConcat(single).value(), a.value()));
}

TEST_CASE("syntax attention with one type is the identity") {
  Graph g;
  Rng rng(5);
  Var h = g.Constant(RandomTensor(1, 3, rng));
  Var s = g.Constant(RandomTensor(1, 3, rng));
  SyntaxAttentionWeights w{g.Constant(RandomTensor(1, 6, rng)), g.Constant(RandomTensor(1, 1, rng))};
  Var summaries[] = {s};
  SyntaxAttentionOutput out = SyntaxAttention(h, summaries, std::span(&w, 1));
  CHECK(out.weights.value()[0] == 1.0);
  CHECK(testing::SameValues(out.summary.value(), s.value()));
}

TEST_CASE("syntax attention symmetry and hand values") {
  Graph g;
  Rng rng(6);
  Var h = g.Constant(RandomTensor(1, 2, rng));
  Var s = g.Constant(RandomTensor(1, 2, rng));
  Var weight = g.Constant(RandomTensor(1, 4, rng));
  Var bias = g.Constant(RandomTensor(1, 1, rng));
  SyntaxAttentionWeights same[] = {{weight, bias}, {weight, bias}};
  Var twice[] = {s, s};
  SyntaxAttentionOutput sym = SyntaxAttention(h, twice, same);
  CHECK(sym.weights.value()[0] == doctest::Approx(0.5));
  CHECK(sym.weights.value()[1] == doctest::Approx(0.5));

  // Zero weights with biases 1 and 0 give q = [sigmoid(1), sigmoid(0)].
  Var zero = g.Constant(Tensor(1, 4));
  SyntaxAttentionWeights hand[] = {{zero, g.Constant(Tensor::FromRows({{1.0}}))},
                                   {zero, g.Constant(Tensor::FromRows({{0.0}}))}};
  Var s1 = g.Constant(Tensor::FromRows({{1, 0}})), s2 = g.Constant(Tensor::FromRows({{0, 1}}));
  Var two[] = {s1, s2};
  SyntaxAttentionOutput out = SyntaxAttention(h, two, hand);
  double q0 = Sigmoid(1.0), q1 = 0.5;
  double a0 = std::exp(q0) / (std::exp(q0) + std::exp(q1));
  CHECK(out.weights.value()[0] == doctest::Approx(0.5575).epsilon(1e-4));
  CHECK(out.weights.value()[1] == doctest::Approx(0.4425).epsilon(1e-4));
  CHECK(std::abs(out.weights.value()[0] - a0) < 1e-15);
  CHECK(std::abs(out.summary.value()[0] - a0) < 1e-15);
  CHECK(std::abs(out.summary.value()[1] - (1 - a0)) < 1e-15);
  CHECK_THROWS_AS(SyntaxAttention(h, two, std::span(hand, 1)), ShapeError);
}

GateWeights Gate(Graph& g, const Tensor& wh, const Tensor& ws, const Tensor& b) {
  return {g.Constant(wh), g.Constant(ws), g.Constant(b)};
}

TEST_CASE("gate at zero weights halves both inputs") {
  Graph g;
  Rng rng(7);
  Tensor h = RandomTensor(2, 3, rng), s = RandomTensor(2, 3, rng);
  GateOutput out = GateFuse(g.Constant(h), g.Constant(s), Gate(g, Tensor(3, 3), Tensor(3, 3), Tensor(1, 3)));
  const Tensor& o = out.fused.value();
  CHECK(o.cols() == 6);
  for (size_t i = 0; i < 2; ++i)
    for (size_t c = 0; c < 3; ++c) {
      CHECK(out.reset.value()(i, c) == 0.5);
      CHECK(o(i, c) == 0.5 * h(i, c));
      CHECK(o(i, c + 3) == 0.5 * s(i, c));
    }
}

TEST_CASE("saturated gate passes the context only") {
  Graph g;
  Tensor h = Tensor::FromRows({{1.5, -2}}), s = Tensor::FromRows({{3, 4}});
  GateOutput out = GateFuse(g.Constant(h), g.Constant(s), Gate(g, Tensor(2, 2), Tensor(2, 2), Tensor(1, 2, 30.0)));
  const Tensor& o = out.fused.value();
  CHECK(o[0] == doctest::Approx(1.5));
  CHECK(o[1] == doctest::Approx(-2));
  CHECK(std::abs(o[2]) < 1e-12);
  CHECK(std::abs(o[3]) < 1e-12);
}

TEST_CASE("gate hand values") {
  Graph g;
  GateOutput out = GateFuse(g.Constant(Tensor::FromRows({{2}})), g.Constant(Tensor::FromRows({{4}})),
                            Gate(g, Tensor::FromRows({{1}}), Tensor::FromRows({{0}}), Tensor(1, 1)));
  double r = Sigmoid(2.0);
  CHECK(out.reset.value()[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(out.fused.value()[0] == doctest::Approx(1.7616).epsilon(1e-4));
  CHECK(out.fused.value()[1] == doctest::Approx(0.4768).epsilon(1e-4));
  CHECK(std::abs(out.fused.value()[0] - 2 * r) < 1e-15);
  CHECK(std::abs(out.fused.value()[1] - 4 * (1 - r)) < 1e-15);
  CHECK_THROWS_AS(GateFuse(g.Constant(Tensor(1, 2)), g.Constant(Tensor(1, 3)),
                           Gate(g, Tensor(2, 2), Tensor(2, 2), Tensor(1, 2))),
                  ShapeError);
}

TEST_CASE("output projection") {
  Graph g;
  Rng rng(8);
  Tensor o = RandomTensor(2, 3, rng);
  Tensor eye = Tensor::FromRows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(testing::SameValues(Project(g.Constant(o), g.Constant(eye)).value(), o));
  Tensor zero = Project(g.Constant(o), g.Constant(Tensor(4, 3))).value();
  for (double v : zero.data()) CHECK(v == 0.0);
  Tensor w = RandomTensor(4, 3, rng);
  Tensor u = Project(g.Constant(o), g.Constant(w)).value();
  for (size_t i = 0; i < 2; ++i)
    for (size_t t = 0; t < 4; ++t) {
      double expect = 0.0;
      for (size_t k = 0; k < 3; ++k) expect += w(t, k) * o(i, k);
      CHECK(std::abs(u(i, t) - expect) < 1e-12);
    }
}

TEST_CASE("normalization invariants over random inputs") {
  Rng rng(9);
  const double e = std::exp(1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g;
    size_t d = 1 + rng() % 5, m = 1 + rng() % 6, types = 1 + rng() % 3;
    Tensor keys = RandomTensor(8, d, rng, 2.0), values = RandomTensor(8, d, rng);
    Var h = g.Constant(RandomTensor(1, d, rng, 2.0));
    std::vector<Var> summaries;
    std::vector<SyntaxAttentionWeights> weights;
    for (size_t c = 0; c < types; ++c) {
      std::vector<int> k(m), v(m);
      for (size_t j = 0; j < m; ++j) {
        k[j] = static_cast<int>(rng() % 8);
        v[j] = static_cast<int>(rng() % 8);
      }
      KvmnOutput mem = KvmnForward(g, h, {&keys, &values}, k, v);
      const Tensor& p = mem.weights.value();
      double total = std::accumulate(p.data().begin(), p.data().end(), 0.0);
      CHECK(std::abs(total - 1.0) < 1e-12);
      for (double x : p.data()) CHECK(x >= 0.0);
      summaries.push_back(mem.summary);
      weights.push_back({g.Constant(RandomTensor(1, 2 * d, rng, 3.0)), g.Constant(RandomTensor(1, 1, rng))});
    }
    SyntaxAttentionOutput sa = SyntaxAttention(h, summaries, weights);
    const Tensor& a = sa.weights.value();
    double total = std::accumulate(a.data().begin(), a.data().end(), 0.0);
    CHECK(std::abs(total - 1.0) < 1e-12);
    double lo = 1.0 / (1.0 + (types - 1.0) * e), hi = e / (e + types - 1.0);
    for (double x : a.data()) {
      CHECK(x >= lo);
      CHECK(x <= hi);
    }
    GateOutput gate = GateFuse(h, sa.summary,
                               {g.Constant(RandomTensor(d, d, rng)), g.Constant(RandomTensor(d, d, rng)),
                                g.Constant(RandomTensor(1, d, rng))});
    CHECK(gate.fused.cols() == 2 * d);
    for (double r : gate.reset.value().data()) {
      CHECK(r > 0.0);
      CHECK(r < 1.0);
    }
  }
}

TEST_CASE("ensemble gradients match finite differences") {
  Rng rng(10);
  const size_t d = 3;
  Tensor keys = RandomTensor(5, d, rng), values = RandomTensor(5, d, rng);
  keys.EnableGrad();
  values.EnableGrad();
  Tensor h = RandomTensor(2, d, rng);
  h.EnableGrad();
  Tensor w1 = RandomTensor(1, 2 * d, rng), b1 = RandomTensor(1, 1, rng);
  Tensor w2 = RandomTensor(1, 2 * d, rng), b2 = RandomTensor(1, 1, rng);
  Tensor wh = RandomTensor(d, d, rng), ws = RandomTensor(d, d, rng), br = RandomTensor(1, d, rng);
  Tensor wo = RandomTensor(4, 2 * d, rng);
  for (Tensor* t : {&w1, &b1, &w2, &b2, &wh, &ws, &br, &wo}) t->EnableGrad();
  std::vector<int> k1 = {0, 1, 2}, v1 = {3, 1, 0}, k2 = {4, 2}, v2 = {2, 4};
  Tensor probe = RandomTensor(2, 4, rng);

  SUBCASE("kvmn") {
    Tensor* params[] = {&keys, &values, &h};
    CHECK(ad::FiniteDiffCheck(
              [&](Graph& g) {
                Var hi = ad::SliceRows(g.Param(h), 0, 1);
                KvmnOutput out = KvmnForward(g, hi, {&keys, &values}, k1, v1);
                return ad::Sum(ad::Mul(out.summary, g.Constant(Tensor::FromRows({{0.3, -1.2, 0.7}}))));
              },
              params) < 1e-4);
  }
  SUBCASE("syntax attention") {
    Tensor s1 = RandomTensor(1, d, rng), s2 = RandomTensor(1, d, rng);
    s1.EnableGrad();
    s2.EnableGrad();
    Tensor* params[] = {&h, &s1, &s2, &w1, &b1, &w2, &b2};
    CHECK(ad::FiniteDiffCheck(
              [&](Graph& g) {
                Var hi = ad::SliceRows(g.Param(h), 0, 1);
                Var sums[] = {g.Param(s1), g.Param(s2)};
                SyntaxAttentionWeights ws_[] = {{g.Param(w1), g.Param(b1)}, {g.Param(w2), g.Param(b2)}};
                return ad::Sum(ad::Mul(SyntaxAttention(hi, sums, ws_).summary,
                                       g.Constant(Tensor::FromRows({{0.3, -1.2, 0.7}}))));
              },
              params) < 1e-4);
  }
  SUBCASE("gate") {
    Tensor s = RandomTensor(2, d, rng);
    s.EnableGrad();
    Tensor* params[] = {&h, &s, &wh, &ws, &br};
    Tensor w = RandomTensor(2, 2 * d, rng);
    CHECK(ad::FiniteDiffCheck(
              [&](Graph& g) {
                GateOutput out = GateFuse(g.Param(h), g.Param(s), {g.Param(wh), g.Param(ws), g.Param(br)});
                return ad::Sum(ad::Mul(out.fused, g.Constant(w)));
              },
              params) < 1e-4);
  }
  SUBCASE("kvmn, attention, gate and projection together") {
    Tensor* params[] = {&keys, &values, &h, &w1, &b1, &w2, &b2, &wh, &ws, &br, &wo};
    CHECK(ad::FiniteDiffCheck(
              [&](Graph& g) {
                Var hv = g.Param(h);
                std::vector<Var> rows;
                for (size_t i = 0; i < 2; ++i) {
                  Var hi = ad::SliceRows(hv, i, 1);
                  Var sums[] = {KvmnForward(g, hi, {&keys, &values}, k1, v1).summary,
                                KvmnForward(g, hi, {&keys, &values}, k2, v2).summary};
                  SyntaxAttentionWeights sw[] = {{g.Param(w1), g.Param(b1)}, {g.Param(w2), g.Param(b2)}};
                  rows.push_back(SyntaxAttention(hi, sums, sw).summary);
                }
                GateOutput out = GateFuse(hv, ad::ConcatRows(rows), {g.Param(wh), g.Param(ws), g.Param(br)});
                return ad::Sum(ad::Mul(Project(out.fused, g.Param(wo)), g.Constant(probe)));
              },
              params) < 1e-4);
  }
}

}  // namespace
}  // namespace aesn
