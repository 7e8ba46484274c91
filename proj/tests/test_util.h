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

#ifndef AESN_TESTS_TEST_UTIL_H_
#define AESN_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "aesn/tensor.h"

namespace aesn::testing {

inline Tensor RandomTensor(size_t rows, size_t cols, Rng& rng, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(rows, cols);
  for (double& x : t.data()) x = dist(rng);
  return t;
}

inline void FillRandom(Tensor& t, Rng& rng, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& x : t.data()) x = dist(rng);
}

inline std::string DataPath(const std::string& name) {
  return std::string(AESN_TEST_DATA_DIR) + "/" + name;
}

inline void CopyValues(const Tensor& from, Tensor& to) {
  std::copy(from.data().begin(), from.data().end(), to.data().begin());
}

inline bool SameValues(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

// A fresh path under the system temp directory; the file is not created.
inline std::string TempPath(const std::string& stem) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path();
  return (dir / ("aesn_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
                 "_" + stem))
      .string();
}

}  // namespace aesn::testing

#endif  // AESN_TESTS_TEST_UTIL_H_
