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

#include "aesn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <vector>

#include "aesn/config.h"
#include "aesn/error.h"

namespace aesn {

namespace {

static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

void PutU32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void PutString(std::ostream& out, const std::string& s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void PutF64(std::ostream& out, double d) {
  uint64_t bits = std::bit_cast<uint64_t>(d);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void Bytes(char* dst, size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) throw Error("checkpoint is truncated");
  }
  uint32_t U32() {
    unsigned char b[4];
    Bytes(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
  }
  double F64() {
    unsigned char b[8];
    Bytes(reinterpret_cast<char*>(b), 8);
    uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = bits << 8 | b[i];
    return std::bit_cast<double>(bits);
  }
  std::string String() {
    uint32_t n = U32();
    std::string s(n, '\0');
    if (n) Bytes(s.data(), n);
    return s;
  }

 private:
  std::istream& in_;
};

void PutVocab(std::ostream& out, const std::string& name, const std::vector<std::string>& items) {
  PutString(out, name);
  PutU32(out, static_cast<uint32_t>(items.size()));
  for (const auto& s : items) PutString(out, s);
}

Vocab MakeVocab(const std::vector<std::string>& entries) {
  Vocab v;
  for (const auto& e : entries) v.Add(e);
  return v;
}

}  // namespace

void SaveCheckpoint(std::ostream& out, const NerModel& model) {
  out.write(kCheckpointMagic, 4);
  out.put(static_cast<char>(kCheckpointVersion));
  PutString(out, SerializeModelConfig(model.config()));

  const ModelVocabs& v = model.vocabs();
  std::vector<std::pair<std::string, std::vector<std::string>>> vocabs;
  vocabs.emplace_back("words", v.words.Entries());
  vocabs.emplace_back("labels", v.labels);
  if (v.static_words) vocabs.emplace_back("static", v.static_words->Entries());
  for (size_t c = 0; c < kNumSyntaxTypes; ++c) {
    if (!v.syntax[c]) continue;
    std::string base = std::string("syntax.") + SyntaxTypeName(static_cast<SyntaxType>(c));
    vocabs.emplace_back(base + ".keys", v.syntax[c]->keys.Entries());
    vocabs.emplace_back(base + ".values", v.syntax[c]->values.Entries());
  }
  PutU32(out, static_cast<uint32_t>(vocabs.size()));
  for (const auto& [name, items] : vocabs) PutVocab(out, name, items);

  const ParamRegistry& params = model.params();
  PutU32(out, static_cast<uint32_t>(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    const Tensor& t = params.at(i);
    PutString(out, params.name(i));
    PutU32(out, static_cast<uint32_t>(t.shape().size()));
    for (size_t d : t.shape()) PutU32(out, static_cast<uint32_t>(d));
    for (double x : t.data()) PutF64(out, x);
  }
  if (!out) throw Error("failed to write checkpoint");
}

void SaveCheckpointFile(const std::string& path, const NerModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create checkpoint file: " + path);
  SaveCheckpoint(out, model);
}

std::unique_ptr<NerModel> LoadCheckpoint(std::istream& in) {
  Reader r(in);
  char magic[4];
  try {
    r.Bytes(magic, 4);
  } catch (const Error&) {
    throw Error("not an AESN checkpoint (file too short)");
  }
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw Error("not an AESN checkpoint (bad magic)");
  char version;
  r.Bytes(&version, 1);
  if (static_cast<uint8_t>(version) != kCheckpointVersion)
    throw Error("unsupported checkpoint version " +
                std::to_string(static_cast<unsigned>(static_cast<uint8_t>(version))) +
                " (expected " + std::to_string(kCheckpointVersion) + ")");

  RunConfig run;
  LoadConfigText(run, r.String());

  std::map<std::string, std::vector<std::string>> vocabs;
  uint32_t vocab_count = r.U32();
  for (uint32_t k = 0; k < vocab_count; ++k) {
    std::string name = r.String();
    uint32_t n = r.U32();
    std::vector<std::string> items;
    items.reserve(n);
    for (uint32_t j = 0; j < n; ++j) items.push_back(r.String());
    vocabs[name] = std::move(items);
  }

  struct Blob {
    std::string name;
    std::vector<size_t> shape;
    std::vector<double> data;
  };
  std::vector<Blob> blobs;
  uint32_t tensor_count = r.U32();
  for (uint32_t k = 0; k < tensor_count; ++k) {
    Blob b;
    b.name = r.String();
    uint32_t rank = r.U32();
    if (rank > 8) throw Error("checkpoint tensor '" + b.name + "' has implausible rank");
    size_t total = 1;
    for (uint32_t j = 0; j < rank; ++j) {
      b.shape.push_back(r.U32());
      total *= b.shape.back();
    }
    b.data.resize(total);
    for (double& x : b.data) x = r.F64();
    blobs.push_back(std::move(b));
  }

  auto take = [&](const std::string& name) -> const std::vector<std::string>& {
    auto it = vocabs.find(name);
    if (it == vocabs.end()) throw Error("checkpoint lacks vocabulary '" + name + "'");
    return it->second;
  };
  ModelVocabs v;
  v.words = MakeVocab(take("words"));
  v.labels = take("labels");
  if (vocabs.count("static")) {
    v.static_words = MakeVocab(take("static"));
    for (const Blob& b : blobs)
      if (b.name == "embed.static" && b.shape.size() == 2) v.static_dim = b.shape[1];
  }
  for (SyntaxType type : run.train.model.syntax) {
    std::string base = std::string("syntax.") + SyntaxTypeName(type);
    SyntaxVocab sv;
    sv.type = type;
    sv.keys = MakeVocab(take(base + ".keys"));
    sv.values = MakeVocab(take(base + ".values"));
    v.syntax[static_cast<size_t>(type)] = std::move(sv);
  }

  auto model = std::make_unique<NerModel>(run.train.model, std::move(v), 0);
  ParamRegistry& params = model->params();
  if (blobs.size() != params.size())
    throw Error("checkpoint holds " + std::to_string(blobs.size()) + " tensors, model expects " +
                std::to_string(params.size()));
  for (const Blob& b : blobs) {
    if (!params.Contains(b.name)) throw Error("checkpoint tensor '" + b.name + "' is unknown");
    Tensor& t = params.Get(b.name);
    if (t.shape() != b.shape)
      throw Error("checkpoint tensor '" + b.name + "' has shape mismatch with " +
                  t.ShapeString());
    std::copy(b.data.begin(), b.data.end(), t.data().begin());
  }
  return model;
}

std::unique_ptr<NerModel> LoadCheckpointFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint file: " + path);
  try {
    return LoadCheckpoint(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace aesn
