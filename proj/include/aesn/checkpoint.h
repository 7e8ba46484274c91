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

#ifndef AESN_CHECKPOINT_H_
#define AESN_CHECKPOINT_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "aesn/model.h"

namespace aesn {

inline constexpr char kCheckpointMagic[4] = {'A', 'E', 'S', 'N'};
inline constexpr uint8_t kCheckpointVersion = 1;

// Layout, all integers u32 little-endian:
//   "AESN" version(u8)
//   config: length, key=value text
//   vocabularies: count, then per vocabulary: name, entry count, entries
//   tensors: count, then per tensor: name, rank, dims, f64 LE row-major data
// Strings are a length followed by UTF-8 bytes. Vocabulary entries exclude
// the reserved unknown slot.
void SaveCheckpoint(std::ostream& out, const NerModel& model);
void SaveCheckpointFile(const std::string& path, const NerModel& model);

// Throws Error on foreign magic, an unsupported version, truncation, or a
// tensor that does not match the model described by the config section.
std::unique_ptr<NerModel> LoadCheckpoint(std::istream& in);
std::unique_ptr<NerModel> LoadCheckpointFile(const std::string& path);

}  // namespace aesn

#endif  // AESN_CHECKPOINT_H_
