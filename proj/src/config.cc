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

#include "aesn/config.h"

#include <fstream>
#include <sstream>

#include "aesn/error.h"

namespace aesn {

namespace {

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
}

long long ToInt(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
}

size_t ToSize(const std::string& key, const std::string& v) {
  long long i = ToInt(key, v);
  if (i < 0) throw ConfigError("'" + key + "' must be non-negative");
  return static_cast<size_t>(i);
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("'" + key + "' expects on/off, got '" + v + "'");
}

}  // namespace

void ApplyConfigEntry(RunConfig& config, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  for (char& c : key)
    if (c == '-') c = '_';
  TrainConfig& t = config.train;
  ModelConfig& m = t.model;
  if (key == "lr" || key == "learning_rate") t.learning_rate = ToDouble(key, value);
  else if (key == "beta1") t.beta1 = ToDouble(key, value);
  else if (key == "beta2") t.beta2 = ToDouble(key, value);
  else if (key == "epsilon") t.epsilon = ToDouble(key, value);
  else if (key == "batch_size") t.batch_size = ToSize(key, value);
  else if (key == "epochs") t.epochs = ToSize(key, value);
  else if (key == "patience") t.patience = ToSize(key, value);
  else if (key == "seed") t.seed = static_cast<uint64_t>(ToSize(key, value));
  else if (key == "min_word_count") t.min_word_count = ToSize(key, value);
  else if (key == "syntax_min_count") t.syntax_min_count = ToSize(key, value);
  else if (key == "static_vectors") t.static_vectors = value;
  else if (key == "token_col") t.columns.token_col = static_cast<int>(ToInt(key, value));
  else if (key == "pos_col") t.columns.pos_col = static_cast<int>(ToInt(key, value));
  else if (key == "label_col") t.columns.label_col = static_cast<int>(ToInt(key, value));
  else if (key == "encoder") m.encoder.kind = ParseEncoderKind(value);
  else if (key == "layers") m.encoder.layers = static_cast<int>(ToInt(key, value));
  else if (key == "hidden") m.encoder.hidden = static_cast<int>(ToInt(key, value));
  else if (key == "heads") m.encoder.heads = static_cast<int>(ToInt(key, value));
  else if (key == "dropout") m.encoder.dropout = ToDouble(key, value);
  else if (key == "word_dim") m.word_dim = ToSize(key, value);
  else if (key == "pos_window") m.pos_window = ToSize(key, value);
  else if (key == "syntax") m.syntax = value == "none" ? std::vector<SyntaxType>{} : ParseSyntaxTypes(value);
  else if (key == "fusion") m.fusion = ParseFusion(value);
  else if (key == "gate") m.gate = ToBool(key, value);
  else if (key == "crf_mask") m.crf_mask = ToBool(key, value);
  else if (key == "train") config.train_path = value;
  else if (key == "dev") config.dev_path = value;
  else if (key == "test") config.test_path = value;
  else if (key == "trees") config.trees_path = value;
  else if (key == "deps") config.deps_path = value;
  else if (key == "out") config.out_dir = value;
  else throw ConfigError("unknown configuration key '" + raw_key + "'");
}

void LoadConfigText(RunConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = Trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    ApplyConfigEntry(config, Trim(s.substr(0, eq)), Trim(s.substr(eq + 1)));
  }
}

void LoadConfigFile(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  LoadConfigText(config, ss.str());
}

void ValidateTrainConfig(const TrainConfig& config) {
  ValidateModelConfig(config.model);
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.learning_rate <= 0) throw ConfigError("learning rate must be positive");
  if (config.beta1 < 0 || config.beta1 >= 1 || config.beta2 < 0 || config.beta2 >= 1)
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (config.epsilon <= 0) throw ConfigError("epsilon must be positive");
}

std::string SerializeModelConfig(const ModelConfig& m) {
  std::ostringstream out;
  out.precision(17);
  out << "encoder=" << EncoderKindName(m.encoder.kind) << '\n'
      << "layers=" << m.encoder.layers << '\n'
      << "hidden=" << m.encoder.hidden << '\n'
      << "heads=" << m.encoder.heads << '\n'
      << "dropout=" << m.encoder.dropout << '\n'
      << "word_dim=" << m.word_dim << '\n'
      << "pos_window=" << m.pos_window << '\n';
  out << "syntax=";
  if (m.syntax.empty()) out << "none";
  for (size_t i = 0; i < m.syntax.size(); ++i) {
    if (i) out << ',';
    std::string name = SyntaxTypeName(m.syntax[i]);
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out << name;
  }
  out << '\n'
      << "fusion=" << FusionName(m.fusion) << '\n'
      << "gate=" << (m.gate ? "on" : "off") << '\n'
      << "crf_mask=" << (m.crf_mask ? "on" : "off") << '\n';
  return out.str();
}

}  // namespace aesn
