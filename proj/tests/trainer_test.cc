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

#include "aesn/trainer.h"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "aesn/checkpoint.h"
#include "aesn/config.h"
#include "aesn/dataset.h"
#include "aesn/error.h"
#include "aesn/evaluate.h"
#include "aesn/optim.h"
#include "aesn/synth.h"
#include "test_util.h"

namespace aesn {
namespace {

std::string WriteTemp(const std::string& stem, const std::string& text) {
  std::string path = testing::TempPath(stem);
  std::ofstream(path) << text;
  return path;
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Split SplitFromText(const std::string& conll) {
  return LoadSplit({WriteTemp("split.conll", conll), "", ""}, ColumnMap{});
}

const char kToyCorpus[] =
    "Alice NNP B-PER\nSmith NNP I-PER\nvisited VBD O\nParis NNP B-LOC\n. . O\n\n"
    "Bob NNP B-PER\nlikes VBZ O\nRome NNP B-LOC\n. . O\n";

TrainConfig SmallConfig() {
  TrainConfig c;
  c.model.encoder.hidden = 8;
  c.model.encoder.heads = 2;
  c.model.encoder.layers = 1;
  c.model.encoder.dropout = 0.0;
  c.model.word_dim = 8;
  c.learning_rate = 1e-2;
  c.batch_size = 2;
  return c;
}

TEST_CASE("adam first step") {
  AdamOptions opt;
  opt.learning_rate = 0.01;
  SUBCASE("moves by about the learning rate against the gradient") {
    Tensor theta(1, 3, 0.5);
    AdamMoments m;
    std::vector<double> grad = {2.0, -2.0, 1e-3};
    AdamUpdate(theta, grad, 1.0, m, 1, opt);
    double up = theta[0] - 0.5, down = theta[1] - 0.5;
    CHECK(up < 0);
    CHECK(down > 0);
    for (double delta : {up, down, theta[2] - 0.5}) {
      CHECK(std::abs(delta) <= opt.learning_rate);
      CHECK(std::abs(delta) >= 0.9 * opt.learning_rate);
    }
    CHECK(up == doctest::Approx(-opt.learning_rate).epsilon(1e-6));
  }
  SUBCASE("zero gradient leaves the parameter") {
    Tensor theta(2, 2, -1.25);
    AdamMoments m;
    std::vector<double> grad(4, 0.0);
    AdamUpdate(theta, grad, 1.0, m, 1, opt);
    for (double x : theta.data()) CHECK(x == -1.25);
  }
  SUBCASE("non-finite gradient names the parameter") {
    ParamRegistry params;
    Tensor& a = params.Add("layer.ok", {1, 2});
    Tensor& b = params.Add("layer.broken", {1, 2});
    a.grad()[0] = 1.0;
    b.grad()[1] = std::numeric_limits<double>::quiet_NaN();
    Adam adam(opt);
    try {
      adam.Step(params);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("layer.broken") != std::string::npos);
    }
    CHECK(a[0] == 0.0);
    CHECK(adam.steps() == 0);
  }
}

TEST_CASE("span scoring of hand-checked files") {
  EvalReport partial = ScoreConllPairsFile(testing::DataPath("eval_partial.txt"));
  CHECK(partial.micro.gold == 3);
  CHECK(partial.micro.predicted == 4);
  CHECK(partial.micro.correct == 2);
  CHECK(partial.micro.precision == doctest::Approx(50.00));
  CHECK(partial.micro.recall == doctest::Approx(66.67));
  CHECK(partial.micro.f1 == doctest::Approx(57.14));
  CHECK(partial.per_type.at("PER").f1 == doctest::Approx(100.0));
  CHECK(partial.per_type.at("LOC").recall == doctest::Approx(0.0));

  EvalReport same = ScoreConllPairsFile(testing::DataPath("eval_identical.txt"));
  CHECK(same.micro.precision == doctest::Approx(100.0));
  CHECK(same.micro.recall == doctest::Approx(100.0));
  CHECK(same.micro.f1 == doctest::Approx(100.0));

  EvalReport boundary = ScoreConllPairsFile(testing::DataPath("eval_boundary.txt"));
  CHECK(boundary.micro.correct == 0);
  CHECK(boundary.micro.f1 == 0.0);
  CHECK_FALSE(FormatReport(partial).empty());
}

TEST_CASE("scores from counts") {
  SpanScore s;
  FinalizeScore(s);
  CHECK(s.f1 == 0.0);
  s = {3, 3, 1};
  FinalizeScore(s);
  CHECK(s.precision == doctest::Approx(33.33));
  CHECK(s.f1 == doctest::Approx(33.33));
  EvalReport r = ScoreSequences({{"S-PER", "O", "B-LOC", "E-LOC"}}, {{"S-PER", "O", "S-LOC", "O"}});
  CHECK(r.micro.correct == 1);
  CHECK(r.micro.f1 == doctest::Approx(50.0));
  CHECK(r.token_accuracy == doctest::Approx(50.0));
}

TEST_CASE("config entries") {
  RunConfig c;
  LoadConfigText(c, "# comment\n\nlr = 0.002\nbatch-size=4\nencoder=bilstm\nsyntax=pos,dep\n"
                    "fusion=dc\ngate=off\ntrain=/x/train.conll\n");
  CHECK(c.train.learning_rate == 0.002);
  CHECK(c.train.batch_size == 4);
  CHECK(c.train.model.encoder.kind == EncoderKind::kBiLstm);
  CHECK(c.train.model.syntax == std::vector<SyntaxType>{SyntaxType::kPos, SyntaxType::kDep});
  CHECK(c.train.model.fusion == Fusion::kDirectConcat);
  CHECK_FALSE(c.train.model.gate);
  CHECK(c.train_path == "/x/train.conll");
  ValidateTrainConfig(c.train);

  CHECK_THROWS_AS(LoadConfigText(c, "colour=blue\n"), ConfigError);
  CHECK_THROWS_AS(LoadConfigText(c, "epochs=many\n"), ConfigError);
  CHECK_THROWS_AS(LoadConfigText(c, "just words\n"), ConfigError);
  RunConfig bad;
  LoadConfigText(bad, "fusion=dc\ngate=on\n");
  CHECK_THROWS_AS(ValidateTrainConfig(bad.train), ConfigError);

  RunConfig round;
  round.train.model.encoder.hidden = 48;
  round.train.model.encoder.heads = 6;
  round.train.model.crf_mask = true;
  RunConfig back;
  LoadConfigText(back, SerializeModelConfig(round.train.model));
  CHECK(SerializeModelConfig(back.train.model) == SerializeModelConfig(round.train.model));
}

TEST_CASE("training lowers the loss on a toy corpus") {
  Split train = SplitFromText(kToyCorpus);
  TrainConfig c = SmallConfig();
  c.model.syntax.clear();
  c.model.fusion = Fusion::kNone;
  c.model.gate = false;
  c.epochs = 5;
  TrainResult r = Train(c, train, train);
  REQUIRE(r.log.size() == 5);
  for (size_t e = 1; e < r.log.size(); ++e) CHECK(r.log[e].loss < r.log[e - 1].loss);
  CHECK(r.best_epoch >= 1);
  std::string metrics = FormatMetricsLog(r.log);
  CHECK(metrics.rfind("epoch\tloss\tdev_P\tdev_R\tdev_F1\n", 0) == 0);
}

TEST_CASE("training is deterministic for a fixed seed") {
  SynthOptions o;
  o.train_sentences = 20;
  o.dev_sentences = 5;
  o.test_sentences = 1;
  std::string dir = testing::TempPath("synth_det");
  WriteSynth(GenerateSynth(o), dir);
  Split train = LoadSplit(ResolveSplitPaths(dir + "/train.conll"), ColumnMap{});
  Split dev = LoadSplit(ResolveSplitPaths(dir + "/dev.conll"), ColumnMap{});
  TrainConfig c = SmallConfig();
  c.model.encoder.dropout = 0.2;
  c.epochs = 2;
  c.batch_size = 4;
  TrainResult a = Train(c, train, dev), b = Train(c, train, dev);
  std::ostringstream sa, sb;
  SaveCheckpoint(sa, *a.model);
  SaveCheckpoint(sb, *b.model);
  CHECK(sa.str() == sb.str());
  CHECK(FormatMetricsLog(a.log) == FormatMetricsLog(b.log));
  c.seed = 2;
  TrainResult other = Train(c, train, dev);
  std::ostringstream so;
  SaveCheckpoint(so, *other.model);
  CHECK(so.str() != sa.str());
}

TEST_CASE("evaluation rejects labels the model lacks") {
  Split train = SplitFromText(kToyCorpus);
  TrainConfig c = SmallConfig();
  c.model.syntax.clear();
  c.model.fusion = Fusion::kNone;
  c.model.gate = false;
  c.epochs = 1;
  TrainResult r = Train(c, train, train);
  Split foreign = SplitFromText("Acme NNP B-ORG\nsells VBZ O\n");
  try {
    Evaluate(*r.model, foreign.sentences);
    FAIL("expected label-set mismatch");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("label-set mismatch") != std::string::npos);
  }
  CHECK(Evaluate(*r.model, train.sentences).tokens == 9);
}

struct TrainedToy {
  Split train;
  TrainResult result;
};

TrainedToy TrainSyntaxToy() {
  TrainedToy toy;
  toy.train = SplitFromText(kToyCorpus + std::string("\nParis NNP S-LOC\n"));
  TrainConfig c = SmallConfig();
  c.model.syntax = {SyntaxType::kPos};
  c.epochs = 2;
  toy.result = Train(c, toy.train, toy.train);
  return toy;
}

TEST_CASE("checkpoint round trip") {
  TrainedToy toy = TrainSyntaxToy();
  std::ostringstream first;
  SaveCheckpoint(first, *toy.result.model);
  std::istringstream in(first.str());
  std::unique_ptr<NerModel> loaded = LoadCheckpoint(in);
  std::ostringstream second;
  SaveCheckpoint(second, *loaded);
  CHECK(first.str() == second.str());
  CHECK(PredictLabels(*loaded, toy.train.sentences) ==
        PredictLabels(*toy.result.model, toy.train.sentences));

  std::string path = testing::TempPath("model.aesn");
  SaveCheckpointFile(path, *loaded);
  CHECK(ReadAll(path) == first.str());

  std::string bytes = first.str();
  std::istringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_WITH_AS(LoadCheckpoint(truncated), doctest::Contains("truncated"), Error);
  std::string foreign = bytes;
  foreign[0] = 'X';
  std::istringstream wrong(foreign);
  CHECK_THROWS_AS(LoadCheckpoint(wrong), Error);
  CHECK_THROWS_AS(LoadCheckpointFile(testing::TempPath("missing.aesn")), Error);
}

TEST_CASE("inspection reports normalized weights") {
  TrainedToy toy = TrainSyntaxToy();
  const NerModel& model = *toy.result.model;
  const AnnotatedSentence& single = toy.train.sentences.back();
  REQUIRE(single.sentence.size() == 1);
  Instance inst = model.MakeInstance(single);
  ad::Graph g;
  ForwardResult fwd = model.Forward(g, inst, nullptr, true);
  const TokenTrace& t = fwd.trace[0];
  REQUIRE(t.memory_weights[static_cast<size_t>(SyntaxType::kPos)].size() == 1);
  CHECK(t.memory_weights[static_cast<size_t>(SyntaxType::kPos)][0] == 1.0);
  REQUIRE(t.type_weights.size() == 1);
  CHECK(t.type_weights[0] == 1.0);
  CHECK(t.gate_norm > 0.0);

  std::ostringstream out;
  WriteInspection(out, model, single, 3);
  std::string text = out.str();
  CHECK(text.find("sent\ttok\tsurface\tlabel\tPOS\ttypes\tgate_norm") == 0);
  CHECK(text.find("3\t0\tParis\t") != std::string::npos);
  CHECK(text.find(":1.000000") != std::string::npos);

  const AnnotatedSentence& first = toy.train.sentences.front();
  ad::Graph g2;
  ForwardResult full = model.Forward(g2, model.MakeInstance(first), nullptr, true);
  for (const TokenTrace& tok : full.trace) {
    double sum = 0.0;
    for (double p : tok.memory_weights[static_cast<size_t>(SyntaxType::kPos)]) sum += p;
    CHECK(sum == doctest::Approx(1.0));
  }
  std::ostringstream one;
  WriteInspection(one, model, first, 0, 2);
  std::istringstream lines(one.str());
  std::string line;
  size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2);
  CHECK(one.str().find("\tvisited\t") != std::string::npos);
}

TEST_CASE("synthetic corpus generation") {
  SynthOptions o;
  o.train_sentences = 30;
  o.dev_sentences = 5;
  o.test_sentences = 5;
  SynthCorpus a = GenerateSynth(o), b = GenerateSynth(o);
  CHECK(a.train.conll == b.train.conll);
  CHECK(a.train.trees == b.train.trees);
  CHECK(a.test.deps == b.test.deps);
  o.seed = 8;
  CHECK(GenerateSynth(o).train.conll != a.train.conll);

  o.noise = 0.0;
  std::string dir = testing::TempPath("synth_clean");
  WriteSynth(GenerateSynth(o), dir);
  Split clean = LoadSplit(ResolveSplitPaths(dir + "/train.conll"), ColumnMap{});
  CHECK(clean.stats.pos_conflicts == 0);
  // With clean parses, each entity's type is the type of the cue that governs
  // its head word.
  size_t entities = 0;
  for (const AnnotatedSentence& s : clean.sentences) {
    REQUIRE(s.deps.has_value());
    for (const EntitySpan& span : DecodeSpans(s.sentence.labels)) {
      ++entities;
      size_t head = span.end;
      size_t gov = s.deps->head.at(head);
      REQUIRE(gov > 0);
      const std::string& cue = s.sentence.tokens.at(gov - 1).surface;
      REQUIRE(cue.rfind("cue", 0) == 0);
      size_t type = std::stoul(cue.substr(3)) / o.cues_per_type;
      CHECK(SynthTypeName(type) == span.etype);
    }
  }
  CHECK(entities >= 30);

  SynthOptions bad;
  bad.noise = 1.5;
  CHECK_THROWS_AS(GenerateSynth(bad), ConfigError);
}

}  // namespace
}  // namespace aesn
