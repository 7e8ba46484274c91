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

#include "aesn/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aesn/corpus.h"
#include "aesn/error.h"

namespace aesn::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

size_t CheckShapes(const Tensor& emissions, const Tensor& transitions, const Tensor& bias) {
  size_t t = emissions.cols();
  if (emissions.rows() == 0 || t == 0)
    throw ShapeError("crf: empty emission table " + emissions.ShapeString());
  if (transitions.rows() != t + 2 || transitions.cols() != t + 2)
    throw ShapeError("crf: transitions " + transitions.ShapeString() + " do not match " +
                     std::to_string(t) + " labels");
  if (bias.size() != t)
    throw ShapeError("crf: bias " + bias.ShapeString() + " does not match " + std::to_string(t) +
                     " labels");
  return t;
}

double LogSumExp(const double* x, size_t n) {
  double mx = *std::max_element(x, x + n);
  if (mx == kNegInf) return kNegInf;
  double z = 0.0;
  for (size_t i = 0; i < n; ++i) z += std::exp(x[i] - mx);
  return mx + std::log(z);
}

// Emission plus bias, e[i][y].
std::vector<double> Unary(const Tensor& emissions, const Tensor& bias) {
  size_t n = emissions.rows(), t = emissions.cols();
  std::vector<double> e(n * t);
  for (size_t i = 0; i < n; ++i)
    for (size_t y = 0; y < t; ++y) e[i * t + y] = emissions(i, y) + bias[y];
  return e;
}

struct Lattice {
  size_t n, t;
  std::vector<double> unary;  // [n, t]
  std::vector<double> alpha;  // [n, t]
  std::vector<double> beta;   // [n, t]
  double log_z;
};

Lattice ForwardBackward(const Tensor& emissions, const Tensor& transitions, const Tensor& bias,
                        bool with_beta) {
  size_t t = CheckShapes(emissions, transitions, bias);
  size_t n = emissions.rows();
  size_t start = StartState(t), stop = StopState(t);
  Lattice lat{n, t, Unary(emissions, bias), std::vector<double>(n * t), {}, 0.0};
  std::vector<double> buf(t);
  for (size_t y = 0; y < t; ++y) lat.alpha[y] = transitions(start, y) + lat.unary[y];
  for (size_t i = 1; i < n; ++i) {
    for (size_t y = 0; y < t; ++y) {
      for (size_t a = 0; a < t; ++a) buf[a] = lat.alpha[(i - 1) * t + a] + transitions(a, y);
      lat.alpha[i * t + y] = lat.unary[i * t + y] + LogSumExp(buf.data(), t);
    }
  }
  for (size_t y = 0; y < t; ++y) buf[y] = lat.alpha[(n - 1) * t + y] + transitions(y, stop);
  lat.log_z = LogSumExp(buf.data(), t);
  if (with_beta) {
    lat.beta.assign(n * t, 0.0);
    for (size_t y = 0; y < t; ++y) lat.beta[(n - 1) * t + y] = transitions(y, stop);
    for (size_t i = n - 1; i-- > 0;) {
      for (size_t a = 0; a < t; ++a) {
        for (size_t b = 0; b < t; ++b)
          buf[b] = transitions(a, b) + lat.unary[(i + 1) * t + b] + lat.beta[(i + 1) * t + b];
        lat.beta[i * t + a] = LogSumExp(buf.data(), t);
      }
    }
  }
  return lat;
}

void CheckBruteSize(size_t n, size_t t) {
  if (std::pow(static_cast<double>(t), static_cast<double>(n)) > kMaxBrutePaths)
    throw Error("brute-force CRF oracle refused: " + std::to_string(t) + "^" + std::to_string(n) +
                " paths exceed the limit");
}

// Calls visit(labels) for every sequence in lexicographic order.
template <typename Visit>
void Enumerate(size_t n, size_t t, Visit visit) {
  std::vector<int> labels(n, 0);
  while (true) {
    visit(labels);
    size_t i = n;
    while (i > 0) {
      --i;
      if (static_cast<size_t>(++labels[i]) < t) break;
      labels[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

}  // namespace

double PathScore(const Tensor& emissions, const Tensor& transitions, const Tensor& bias,
                 std::span<const int> labels) {
  size_t t = CheckShapes(emissions, transitions, bias);
  size_t n = emissions.rows();
  if (labels.size() != n) throw ShapeError("crf: label sequence length differs from emissions");
  for (int y : labels)
    if (y < 0 || static_cast<size_t>(y) >= t)
      throw Error("crf: label id " + std::to_string(y) + " out of range");
  double s = transitions(StartState(t), labels[0]);
  for (size_t i = 0; i < n; ++i) {
    s += emissions(i, labels[i]) + bias[labels[i]];
    if (i > 0) s += transitions(labels[i - 1], labels[i]);
  }
  return s + transitions(labels[n - 1], StopState(t));
}

double LogPartition(const Tensor& emissions, const Tensor& transitions, const Tensor& bias) {
  return ForwardBackward(emissions, transitions, bias, false).log_z;
}

Tensor Marginals(const Tensor& emissions, const Tensor& transitions, const Tensor& bias) {
  Lattice lat = ForwardBackward(emissions, transitions, bias, true);
  Tensor m(lat.n, lat.t);
  for (size_t k = 0; k < lat.n * lat.t; ++k) m[k] = std::exp(lat.alpha[k] + lat.beta[k] - lat.log_z);
  return m;
}

Decoded Viterbi(const Tensor& emissions, const Tensor& transitions, const Tensor& bias) {
  size_t t = CheckShapes(emissions, transitions, bias);
  size_t n = emissions.rows();
  std::vector<double> unary = Unary(emissions, bias);
  std::vector<double> delta(n * t);
  std::vector<int> back(n * t, 0);
  for (size_t y = 0; y < t; ++y) delta[y] = transitions(StartState(t), y) + unary[y];
  for (size_t i = 1; i < n; ++i) {
    for (size_t y = 0; y < t; ++y) {
      double best = kNegInf;
      int arg = 0;
      for (size_t a = 0; a < t; ++a) {
        double v = delta[(i - 1) * t + a] + transitions(a, y);
        if (v > best) {
          best = v;
          arg = static_cast<int>(a);
        }
      }
      delta[i * t + y] = best + unary[i * t + y];
      back[i * t + y] = arg;
    }
  }
  Decoded out;
  double best = kNegInf;
  int last = 0;
  for (size_t y = 0; y < t; ++y) {
    double v = delta[(n - 1) * t + y] + transitions(y, StopState(t));
    if (v > best) {
      best = v;
      last = static_cast<int>(y);
    }
  }
  out.score = best;
  out.labels.assign(n, 0);
  out.labels[n - 1] = last;
  for (size_t i = n - 1; i > 0; --i) out.labels[i - 1] = back[i * t + out.labels[i]];
  return out;
}

double BruteLogPartition(const Tensor& emissions, const Tensor& transitions, const Tensor& bias) {
  size_t t = CheckShapes(emissions, transitions, bias);
  size_t n = emissions.rows();
  CheckBruteSize(n, t);
  std::vector<double> scores;
  Enumerate(n, t, [&](const std::vector<int>& y) {
    scores.push_back(PathScore(emissions, transitions, bias, y));
  });
  return LogSumExp(scores.data(), scores.size());
}

Decoded BruteBest(const Tensor& emissions, const Tensor& transitions, const Tensor& bias) {
  size_t t = CheckShapes(emissions, transitions, bias);
  size_t n = emissions.rows();
  CheckBruteSize(n, t);
  Decoded best;
  best.score = kNegInf;
  Enumerate(n, t, [&](const std::vector<int>& y) {
    double s = PathScore(emissions, transitions, bias, y);
    if (s > best.score) {
      best.score = s;
      best.labels = y;
    }
  });
  return best;
}

double BrutePathProbabilitySum(const Tensor& emissions, const Tensor& transitions,
                               const Tensor& bias) {
  double log_z = BruteLogPartition(emissions, transitions, bias);
  double total = 0.0;
  Enumerate(emissions.rows(), emissions.cols(), [&](const std::vector<int>& y) {
    total += std::exp(PathScore(emissions, transitions, bias, y) - log_z);
  });
  return total;
}

ad::Var Nll(ad::Var emissions, ad::Var transitions, ad::Var bias, std::span<const int> gold) {
  const Tensor& u = emissions.value();
  const Tensor& tr = transitions.value();
  const Tensor& b = bias.value();
  size_t t = CheckShapes(u, tr, b);
  size_t n = u.rows();
  if (gold.size() != n) throw ShapeError("crf nll: gold length differs from emissions");
  std::vector<int> labels(gold.begin(), gold.end());
  double gold_score = PathScore(u, tr, b, labels);
  double log_z = LogPartition(u, tr, b);
  Tensor loss(1, 1);
  loss[0] = log_z - gold_score;
  size_t iu = emissions.id, it = transitions.id, ib = bias.id;
  return emissions.graph->AddNode(
      std::move(loss), [iu, it, ib, n, t, labels = std::move(labels)](ad::Graph& g, size_t self) {
        double up = g.grad(self)[0];
        const Tensor& u = g.value(iu);
        const Tensor& tr = g.value(it);
        const Tensor& b = g.value(ib);
        Lattice lat = ForwardBackward(u, tr, b, true);
        size_t start = StartState(t), stop = StopState(t), width = t + 2;
        auto du = g.grad(iu);
        auto db = g.grad(ib);
        auto dt = g.grad(it);
        for (size_t i = 0; i < n; ++i) {
          for (size_t y = 0; y < t; ++y) {
            double m = std::exp(lat.alpha[i * t + y] + lat.beta[i * t + y] - lat.log_z);
            double d = up * (m - (labels[i] == static_cast<int>(y) ? 1.0 : 0.0));
            du[i * t + y] += d;
            db[y] += d;
          }
        }
        // Expected transition counts.
        for (size_t y = 0; y < t; ++y) {
          double first = std::exp(lat.alpha[y] + lat.beta[y] - lat.log_z);
          double last = std::exp(lat.alpha[(n - 1) * t + y] + lat.beta[(n - 1) * t + y] - lat.log_z);
          dt[start * width + y] += up * first;
          dt[y * width + stop] += up * last;
        }
        for (size_t i = 1; i < n; ++i)
          for (size_t a = 0; a < t; ++a)
            for (size_t c = 0; c < t; ++c) {
              double xi = std::exp(lat.alpha[(i - 1) * t + a] + tr(a, c) + lat.unary[i * t + c] +
                                   lat.beta[i * t + c] - lat.log_z);
              dt[a * width + c] += up * xi;
            }
        // Observed counts.
        dt[start * width + labels[0]] -= up;
        dt[labels[n - 1] * width + stop] -= up;
        for (size_t i = 1; i < n; ++i) dt[labels[i - 1] * width + labels[i]] -= up;
      });
}

Tensor BioesTransitionMask(const std::vector<std::string>& labels) {
  size_t t = labels.size();
  Tensor mask(t + 2, t + 2);
  std::vector<ParsedLabel> parsed;
  for (const auto& l : labels) parsed.push_back(ParseLabel(l));
  auto inside = [](char tag) { return tag == 'I' || tag == 'E'; };
  auto opens = [](char tag) { return tag == 'B' || tag == 'I'; };
  constexpr double kForbidden = -1e4;
  for (size_t b = 0; b < t; ++b)
    if (inside(parsed[b].tag)) mask(StartState(t), b) = kForbidden;
  for (size_t a = 0; a < t; ++a) {
    if (opens(parsed[a].tag)) mask(a, StopState(t)) = kForbidden;
    for (size_t b = 0; b < t; ++b) {
      bool ok;
      if (opens(parsed[a].tag)) {
        ok = inside(parsed[b].tag) && parsed[b].type == parsed[a].type;
      } else {
        ok = !inside(parsed[b].tag);
      }
      if (!ok) mask(a, b) = kForbidden;
    }
  }
  // START/STOP rows and columns that are never used stay at zero.
  return mask;
}

}  // namespace aesn::crf
