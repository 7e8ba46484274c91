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

// Command-line front end: train, eval, predict, inspect, gen-synth.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aesn/checkpoint.h"
#include "aesn/config.h"
#include "aesn/dataset.h"
#include "aesn/error.h"
#include "aesn/evaluate.h"
#include "aesn/synth.h"
#include "aesn/trainer.h"

namespace {

namespace fs = std::filesystem;
using namespace aesn;

// Settings that can come from --config and be overridden on the command line.
struct Overrides {
  std::string config_path;
  // Applied before the config file.
  std::map<std::string, std::string> defaults;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void Add(CLI::App* app, const std::string& flag, const std::string& help) {
    options.emplace_back(flag, app->add_option("--" + flag, values[flag], help));
  }

  RunConfig Resolve() {
    RunConfig run;
    for (const auto& [key, value] : defaults) ApplyConfigEntry(run, key, value);
    if (!config_path.empty()) LoadConfigFile(run, config_path);
    for (const auto& [flag, opt] : options)
      if (opt->count() > 0) ApplyConfigEntry(run, flag, values[flag]);
    return run;
  }
};

void AddModelFlags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "key=value settings file");
  o.Add(app, "encoder", "bilstm|transformer|adapted");
  o.Add(app, "syntax", "comma list of pos,con,dep (or none)");
  o.Add(app, "fusion", "none|dc|sa");
  o.Add(app, "gate", "on|off");
  o.Add(app, "crf-mask", "on|off");
  o.Add(app, "seed", "random seed");
  o.Add(app, "layers", "encoder layers");
  o.Add(app, "hidden", "hidden size");
  o.Add(app, "heads", "attention heads");
  o.Add(app, "dropout", "dropout rate");
  o.Add(app, "word-dim", "word embedding size");
  o.Add(app, "lr", "Adam learning rate");
  o.Add(app, "batch-size", "sentences per update");
  o.Add(app, "epochs", "maximum epochs");
  o.Add(app, "patience", "stop after N epochs without dev improvement (0 = never)");
  o.Add(app, "static-vectors", "frozen word vectors file");
}

void AddColumnFlags(CLI::App* app, Overrides& o) {
  o.Add(app, "token-col", "token column");
  o.Add(app, "pos-col", "POS column (-1 for none)");
  o.Add(app, "label-col", "label column (-1 for unlabeled)");
}

void AddSyntaxFileFlags(CLI::App* app, Overrides& o) {
  o.Add(app, "trees", "bracketed trees, one per sentence (default: sibling .trees)");
  o.Add(app, "deps", "dependency blocks (default: sibling .deps)");
}

Split LoadInput(const RunConfig& run, const std::string& path) {
  return LoadSplit(ResolveSplitPaths(path, run.trees_path, run.deps_path), run.train.columns);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

int RunTrain(Overrides& o) {
  RunConfig run = o.Resolve();
  if (run.train_path.empty() || run.dev_path.empty())
    throw ConfigError("train needs --train and --dev");
  if (run.out_dir.empty()) throw ConfigError("train needs --out");
  ValidateTrainConfig(run.train);
  Split train = LoadSplit(ResolveSplitPaths(run.train_path), run.train.columns);
  Split dev = LoadSplit(ResolveSplitPaths(run.dev_path), run.train.columns);
  if (train.repairs + dev.repairs > 0)
    std::cerr << "note: promoted " << train.repairs + dev.repairs
              << " orphan I- labels to B- while converting to BIOES\n";
  if (train.stats.pos_conflicts + dev.stats.pos_conflicts > 0)
    std::cerr << "note: " << train.stats.pos_conflicts + dev.stats.pos_conflicts
              << " tokens where the POS column and tree preterminals disagree\n";

  fs::create_directories(run.out_dir);
  std::cout << "epoch\tloss\tdev_P\tdev_R\tdev_F1\n";
  TrainResult result = Train(run.train, train, dev, [](const EpochRecord& r) {
    std::string rows = FormatMetricsLog({r});
    std::cout << rows.substr(rows.find('\n') + 1) << std::flush;
  });
  fs::path out(run.out_dir);
  WriteText(out / "metrics.tsv", FormatMetricsLog(result.log));
  SaveCheckpointFile((out / "model.aesn").string(), *result.model);
  std::cout << "best epoch " << result.best_epoch << "; checkpoint "
            << (out / "model.aesn").string() << "\n";
  if (!run.test_path.empty()) {
    Split test = LoadSplit(ResolveSplitPaths(run.test_path), run.train.columns);
    std::string report = FormatReport(Evaluate(*result.model, test.sentences));
    WriteText(out / "test_report.txt", report);
    std::cout << report;
  }
  return 0;
}

int RunEval(Overrides& o, const std::string& model_path, const std::string& input) {
  RunConfig run = o.Resolve();
  std::string path = input.empty() ? run.test_path : input;
  if (path.empty()) throw ConfigError("eval needs --test");
  auto model = LoadCheckpointFile(model_path);
  Split data = LoadInput(run, path);
  std::cout << FormatReport(Evaluate(*model, data.sentences));
  return 0;
}

int RunPredict(Overrides& o, const std::string& model_path, const std::string& input,
               const std::string& output, const std::string& scheme) {
  RunConfig run = o.Resolve();
  auto model = LoadCheckpointFile(model_path);
  Split data = LoadInput(run, input);
  LabelScheme s = scheme == "bio" ? LabelScheme::kBio : LabelScheme::kBioes;
  if (output.empty()) {
    WritePredictions(std::cout, *model, data.sentences, s);
  } else {
    std::ofstream out(output);
    if (!out) throw Error("cannot write " + output);
    WritePredictions(out, *model, data.sentences, s);
  }
  return 0;
}

int RunInspect(Overrides& o, const std::string& model_path, const std::string& input,
               size_t sentence, std::optional<size_t> token, bool memory) {
  RunConfig run = o.Resolve();
  auto model = LoadCheckpointFile(model_path);
  Split data = LoadInput(run, input);
  if (sentence >= data.sentences.size())
    throw Error("sentence index " + std::to_string(sentence) + " out of range (" +
                std::to_string(data.sentences.size()) + " sentences)");
  const AnnotatedSentence& s = data.sentences[sentence];
  if (memory) {
    const ModelConfig& mc = model->config();
    WriteMemoryDump(std::cout, sentence, ExtractMemory(s, mc.syntax, mc.pos_window), mc.syntax);
    return 0;
  }
  WriteInspection(std::cout, *model, s, sentence, token);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Syntax-aware named entity recognizer"};
  app.require_subcommand(1);

  Overrides train_o, eval_o, predict_o, inspect_o;

  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  AddModelFlags(train, train_o);
  AddColumnFlags(train, train_o);
  train_o.Add(train, "train", "training CoNLL file");
  train_o.Add(train, "dev", "development CoNLL file");
  train_o.Add(train, "test", "optional test CoNLL file scored after training");
  train_o.Add(train, "out", "output directory");

  std::string model_path, input, output, scheme = "bio";
  CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on labeled data");
  eval->add_option("--model", model_path, "checkpoint file")->required();
  eval->add_option("--config", eval_o.config_path, "key=value settings file");
  eval_o.Add(eval, "test", "labeled CoNLL file");
  AddColumnFlags(eval, eval_o);
  AddSyntaxFileFlags(eval, eval_o);

  CLI::App* predict = app.add_subcommand("predict", "label unlabeled text");
  predict_o.defaults["label-col"] = "-1";  // input is unlabeled unless told otherwise
  predict->add_option("--model", model_path, "checkpoint file")->required();
  predict->add_option("--input", input, "CoNLL file (token and POS columns)")->required();
  predict->add_option("--output", output, "output file (default: stdout)");
  predict->add_option("--scheme", scheme, "bio|bioes")->check(CLI::IsMember({"bio", "bioes"}));
  predict->add_option("--config", predict_o.config_path, "key=value settings file");
  AddColumnFlags(predict, predict_o);
  AddSyntaxFileFlags(predict, predict_o);

  size_t sentence = 0;
  std::optional<size_t> token;
  bool memory = false;
  CLI::App* inspect = app.add_subcommand("inspect", "dump attention weights for a sentence");
  inspect->add_option("--model", model_path, "checkpoint file")->required();
  inspect->add_option("--input", input, "CoNLL file")->required();
  inspect->add_option("--sentence", sentence, "sentence index (0-based)");
  inspect->add_option("--token", token, "token index (0-based); default all tokens");
  inspect->add_flag("--memory", memory, "print extracted memory keys and values instead");
  inspect->add_option("--config", inspect_o.config_path, "key=value settings file");
  AddColumnFlags(inspect, inspect_o);
  AddSyntaxFileFlags(inspect, inspect_o);

  SynthOptions synth;
  std::string synth_out;
  CLI::App* gen = app.add_subcommand("gen-synth", "write a synthetic corpus with parses");
  gen->add_option("--out", synth_out, "output directory")->required();
  gen->add_option("--seed", synth.seed, "random seed");
  gen->add_option("--noise", synth.noise, "probability of replacing each annotation");
  gen->add_option("--train-size", synth.train_sentences, "training sentences");
  gen->add_option("--dev-size", synth.dev_sentences, "development sentences");
  gen->add_option("--test-size", synth.test_sentences, "test sentences");
  gen->add_option("--types", synth.entity_types, "entity types");
  gen->add_option("--names", synth.name_vocab, "name vocabulary size");
  gen->add_option("--fillers", synth.filler_vocab, "filler vocabulary size");
  gen->add_option("--cues", synth.cues_per_type, "cue words per type");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return RunTrain(train_o);
    if (*eval) return RunEval(eval_o, model_path, "");
    if (*predict) return RunPredict(predict_o, model_path, input, output, scheme);
    if (*inspect) return RunInspect(inspect_o, model_path, input, sentence, token, memory);
    if (*gen) {
      WriteSynth(GenerateSynth(synth), synth_out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
