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

#ifndef AESN_CONFIG_H_
#define AESN_CONFIG_H_

#include <cstdint>
#include <string>

#include "aesn/corpus.h"
#include "aesn/model.h"

namespace aesn {

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  size_t batch_size = 32;
  size_t epochs = 100;
  // Stop after this many epochs without a dev F1 improvement; 0 disables.
  size_t patience = 0;
  uint64_t seed = 1;
  size_t min_word_count = 1;
  size_t syntax_min_count = 1;
  // Optional frozen word vectors ("surface v1 ... vd" per line).
  std::string static_vectors;
  ColumnMap columns;
};

// Everything a CLI run needs: training settings plus file locations.
struct RunConfig {
  TrainConfig train;
  std::string train_path, dev_path, test_path;
  std::string trees_path, deps_path;
  std::string out_dir;
};

// Applies one "key=value" setting. Throws ConfigError on unknown keys or
// unparsable values. Keys mirror the CLI flag names with '_' for '-'.
void ApplyConfigEntry(RunConfig& config, const std::string& key, const std::string& value);

// Reads "key=value" lines; blank lines and lines starting with '#' are ignored.
void LoadConfigText(RunConfig& config, const std::string& text);
void LoadConfigFile(RunConfig& config, const std::string& path);

// Checks cross-field invariants (fusion/gate/syntax, positive sizes).
void ValidateTrainConfig(const TrainConfig& config);

// Stable "key=value\n" rendering of the model settings; parsed back by
// LoadConfigText.
std::string SerializeModelConfig(const ModelConfig& config);

}  // namespace aesn

#endif  // AESN_CONFIG_H_
