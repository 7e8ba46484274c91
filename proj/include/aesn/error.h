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

#ifndef AESN_ERROR_H_
#define AESN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aesn {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known (0 if not).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Annotation files disagree with the corpus (token counts, surfaces, ...).
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A parse that is well-formed text but not a valid tree.
class StructureError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite value detected where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace aesn

#endif  // AESN_ERROR_H_
