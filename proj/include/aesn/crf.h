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

// Globally normalized linear-chain CRF.
//
// With T labels, the transition matrix is [T+2, T+2]; state T is START and
// state T+1 is STOP, and transitions[a][b] scores a -> b. The score of a label
// sequence y over emissions U [n, T] and per-label bias b [1, T] is
//
//   trans[START][y_0] + sum_i (U[i][y_i] + b[y_i])
//     + sum_{i>0} trans[y_{i-1}][y_i] + trans[y_{n-1}][STOP]
//
// and the loss is log Z - score(gold), Z summing exp(score) over all T^n
// sequences.

#ifndef AESN_CRF_H_
#define AESN_CRF_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aesn/autodiff.h"
#include "aesn/tensor.h"

namespace aesn::crf {

inline size_t StartState(size_t num_labels) { return num_labels; }
inline size_t StopState(size_t num_labels) { return num_labels + 1; }

double PathScore(const Tensor& emissions, const Tensor& transitions, const Tensor& bias,
                 std::span<const int> labels);

// Forward algorithm in log space.
double LogPartition(const Tensor& emissions, const Tensor& transitions, const Tensor& bias);

// Per-position label marginals [n, T] by forward-backward.
Tensor Marginals(const Tensor& emissions, const Tensor& transitions, const Tensor& bias);

struct Decoded {
  std::vector<int> labels;
  double score = 0.0;
};

// Highest-scoring sequence. Ties go to the lowest label id, both for each
// backpointer and for the final state.
Decoded Viterbi(const Tensor& emissions, const Tensor& transitions, const Tensor& bias);

// Largest instance the brute-force oracles accept (T^n paths).
inline constexpr double kMaxBrutePaths = 1e6;

// Exhaustive oracles. Throw Error when T^n exceeds kMaxBrutePaths.
double BruteLogPartition(const Tensor& emissions, const Tensor& transitions, const Tensor& bias);
// Enumerates sequences in lexicographic order and keeps the first maximum.
Decoded BruteBest(const Tensor& emissions, const Tensor& transitions, const Tensor& bias);
// Sum over all paths of exp(score - log Z); 1 up to rounding.
double BrutePathProbabilitySum(const Tensor& emissions, const Tensor& transitions,
                               const Tensor& bias);

// Negative log-likelihood of `gold` as a graph node. Gradients reach all three
// inputs: dU = marginals - onehot(gold), db = column sums of dU, and
// dtrans = expected - observed transition counts. Throws Error on invalid gold
// ids and ShapeError on inconsistent shapes.
ad::Var Nll(ad::Var emissions, ad::Var transitions, ad::Var bias, std::span<const int> gold);

// Additive mask over [T+2, T+2] transitions: -1e4 on moves the BIOES scheme
// forbids (e.g. O -> I-X, B-X -> B-Y, START -> E-X, B-X -> STOP), 0 elsewhere.
Tensor BioesTransitionMask(const std::vector<std::string>& labels);

}  // namespace aesn::crf

#endif  // AESN_CRF_H_
