// Copyright 2026 The cifscd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cifscd: preprocess annotations, generate synthetic data, pretrain, train,
// evaluate and run inference for token-level speaker change detection.
//
// Exit codes: 0 success, 1 usage or other error, 2 parse error, 3 non-finite
// loss, 4 empty segmentation.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cifscd/checkpoint.hpp"
#include "cifscd/corpus.hpp"
#include "cifscd/errors.hpp"
#include "cifscd/metrics.hpp"
#include "cifscd/model.hpp"
#include "cifscd/pipeline.hpp"
#include "cifscd/synthetic.hpp"
#include "json.hpp"

namespace {

using namespace cifscd;
namespace fs = std::filesystem;

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

Level LogLevel() {
  static const Level level = [] {
    const char* env = std::getenv("CIF_SCD_LOG");
    const std::string v = env ? env : "info";
    if (v == "error") return Level::kError;
    if (v == "warn") return Level::kWarn;
    if (v == "debug") return Level::kDebug;
    return Level::kInfo;
  }();
  return level;
}

void Log(Level level, const std::string& message) {
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  if (level <= LogLevel()) std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << message << "\n";
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  Require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  Require(static_cast<bool>(out), ErrorCode::kIoError, "write failed: " + path.string());
}

// Options shared by every subcommand.
struct Globals {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = ".";
  double theta_step = 0.01;
  bool no_content = false;
  bool no_difference = false;
  bool no_sde_conv = false;
  std::optional<std::size_t> context;
  std::optional<double> frame_shift;
  std::optional<std::size_t> downsampling;
};

model::ModelConfig BuildConfig(const Globals& g) {
  nlohmann::json j = nlohmann::json::object();
  if (!g.config_path.empty()) {
    try {
      j = nlohmann::json::parse(ReadFile(g.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError, g.config_path + ": " + e.what());
    }
  }
  model::ModelConfig c = model::ModelConfigFromJson(j);
  if (g.no_content) c.use_content = false;
  if (g.no_difference) c.use_difference = false;
  if (g.no_sde_conv) c.use_conv_in_sde = false;
  if (g.context) c.conv_context = *g.context;
  if (g.frame_shift) c.frame_shift_s = *g.frame_shift;
  if (g.downsampling) c.downsampling = *g.downsampling;
  c.Validate();
  return c;
}

struct TrainFlags {
  std::size_t steps = 0;
  double learning_rate = 1e-3;
  std::size_t warmup_steps = 100;
};

void AddTrainFlags(CLI::App* cmd, TrainFlags& f, std::size_t default_steps) {
  f.steps = default_steps;
  cmd->add_option("--steps", f.steps, "Optimizer steps")->capture_default_str();
  cmd->add_option("--lr", f.learning_rate, "Peak learning rate")->capture_default_str();
  cmd->add_option("--warmup", f.warmup_steps, "Linear warmup steps")->capture_default_str();
}

pipeline::TrainOptions Options(const TrainFlags& f, std::uint64_t seed) {
  return {f.steps, f.learning_rate, f.warmup_steps, seed};
}

std::vector<corpus::SyntheticSentence> LoadData(const std::string& dir) {
  auto data = corpus::ReadDataset(dir);
  Log(Level::kInfo, "loaded " + std::to_string(data.size()) + " sentences from " + dir);
  return data;
}

void SaveCheckpoint(const fs::path& path, const nn::ParameterSet& params, std::uint64_t seed,
                    const model::ModelConfig& config) {
  fs::create_directories(path.parent_path());
  checkpoint::Save(path.string(), checkpoint::Capture(params, seed, model::ToJson(config)));
  Log(Level::kInfo, "wrote " + path.string());
}

void WriteEval(const fs::path& out, const pipeline::EvalResult& r) {
  WriteFile(out / "curve.csv", metrics::FormatCurveCsv(r.curve));
  WriteFile(out / "ecp.json", metrics::EcpToJson(r.ecp).dump(2) + "\n");
  std::cout << metrics::EcpToJson(r.ecp).dump() << "\n";
}

// ---- subcommands ----------------------------------------------------------

struct GenerateArgs {
  std::size_t sentences = 200;
  std::optional<std::size_t> speakers;
};

void RunGenerate(const Globals& g, const GenerateArgs& a) {
  const model::ModelConfig m = BuildConfig(g);
  corpus::SyntheticConfig c;
  c.seed = g.seed;
  c.num_sentences = a.sentences;
  c.num_speakers = a.speakers.value_or(m.num_classes);
  c.vocab_size = m.vocab_size;
  c.feature_dim = m.feature_dim;
  c.downsampling = m.downsampling;
  c.frame_shift_s = m.frame_shift_s;
  c.Validate();
  const auto data = corpus::GenerateSynthetic(c);
  corpus::WriteDataset(g.out_dir, data, corpus::ToJson(c));
  std::cout << nlohmann::json{{"sentences", data.size()}, {"out", g.out_dir}}.dump() << "\n";
}

struct PreprocessArgs {
  std::string annotations;
  corpus::SentencePolicy policy;
};

void RunPreprocess(const Globals& g, const PreprocessArgs& a) {
  std::ifstream in(a.annotations);
  Require(static_cast<bool>(in), ErrorCode::kIoError, "cannot read " + a.annotations);
  const auto intervals = corpus::ParseAnnotations(in);
  const auto sentences = corpus::BuildSentences(intervals, a.policy);
  WriteFile(fs::path(g.out_dir) / "manifest.jsonl", corpus::ManifestJsonLines(sentences));

  std::map<std::string, std::size_t> rejected;
  std::size_t kept = 0;
  for (const auto& s : sentences) {
    if (s.kept) {
      ++kept;
    } else {
      ++rejected[std::string(corpus::RejectReasonName(*s.reject_reason))];
    }
  }
  std::cout << "kept " << kept << "\n";
  for (const auto& [reason, n] : rejected) std::cout << "rejected " << reason << " " << n << "\n";
}

void RunPretrainAsr(const Globals& g, const std::string& data_dir, const TrainFlags& f) {
  const model::ModelConfig config = BuildConfig(g);
  const auto data = LoadData(data_dir);
  model::ScdModel m(config, g.seed);
  const auto log = pipeline::PretrainAsr(m, data, Options(f, g.seed + 1));
  const fs::path out(g.out_dir);
  SaveCheckpoint(out / "asr.ckpt", m.asr.params(), g.seed, config);
  WriteFile(out / "asr_log.csv", pipeline::FormatAsrLog(log));
}

void RunPretrainSpeaker(const Globals& g, const std::string& data_dir, const TrainFlags& f) {
  const model::ModelConfig config = BuildConfig(g);
  const auto data = LoadData(data_dir);
  model::ScdModel m(config, g.seed);
  const auto index = pipeline::SpeakerIndex(data, config.num_classes);
  const auto utterances = pipeline::SpeakerUtterances(data, index, config.downsampling);
  const auto log = pipeline::PretrainSpeaker(m, utterances, Options(f, g.seed + 2));
  const double accuracy = pipeline::SpeakerAccuracy(m, utterances);
  const fs::path out(g.out_dir);
  // The pooling classifier is discarded; only the encoder is kept.
  SaveCheckpoint(out / "speaker.ckpt", m.speaker.params(), g.seed, config);
  WriteFile(out / "speaker_log.csv", pipeline::FormatSpeakerLog(log));
  std::cout << nlohmann::json{{"utterances", utterances.size()}, {"accuracy", accuracy}}.dump()
            << "\n";
}

struct TrainArgs {
  std::string data;
  std::string asr;
  bool random_asr = false;
  std::string speaker;
};

void RunTrain(const Globals& g, const TrainArgs& a, const TrainFlags& f) {
  if (a.asr.empty() == !a.random_asr)
    throw Error(ErrorCode::kInvalidArgument, "pass exactly one of --asr and --random-asr");
  const model::ModelConfig config = BuildConfig(g);
  const auto data = LoadData(a.data);
  model::ScdModel m(config, g.seed);
  if (!a.asr.empty()) {
    nn::ParameterSet asr = m.asr.params();
    checkpoint::Restore(asr, checkpoint::Load(a.asr), true);
  }
  if (!a.speaker.empty()) {
    nn::ParameterSet speaker = m.speaker.params();
    checkpoint::Restore(speaker, checkpoint::Load(a.speaker), true);
  }
  const auto prepared = pipeline::Prepare(m, data, pipeline::SpeakerIndex(data, config.num_classes));
  const auto log = pipeline::TrainJoint(m, prepared, Options(f, g.seed + 3));
  const fs::path out(g.out_dir);
  SaveCheckpoint(out / "model.ckpt", m.AllParams(), g.seed, config);
  WriteFile(out / "train_log.csv", pipeline::FormatJointLog(log));
}

// Model rebuilt from a checkpoint; the stored config wins over flags.
model::ScdModel LoadModel(const std::string& path) {
  const auto ck = checkpoint::Load(path);
  model::ScdModel m(model::ModelConfigFromJson(ck.config), ck.seed);
  nn::ParameterSet all = m.AllParams();
  checkpoint::Restore(all, ck, true);
  return m;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  bool oracle_scores = false;
};

void RunEval(const Globals& g, const EvalArgs& a) {
  const model::ScdModel m = LoadModel(a.checkpoint);
  const auto data = LoadData(a.data);
  const auto prepared =
      pipeline::Prepare(m, data, pipeline::SpeakerIndex(data, m.config.num_classes));
  const auto result = pipeline::Evaluate(m, prepared, metrics::SweepConfig::Uniform(g.theta_step),
                                         a.oracle_scores);
  WriteEval(g.out_dir, result);
}

void RunInfer(const Globals& g, const EvalArgs& a) {
  const model::ScdModel m = LoadModel(a.checkpoint);
  const auto data = LoadData(a.data);
  const auto prepared =
      pipeline::Prepare(m, data, pipeline::SpeakerIndex(data, m.config.num_classes));
  std::string lines;
  for (const auto& p : prepared) {
    const auto doc = pipeline::MakeDocument(p, pipeline::ScoreSentence(m, p));
    nlohmann::json points = nlohmann::json::array();
    for (const auto& c : doc.points.points()) points.push_back({{"time", c.time}, {"score", c.score}});
    lines += nlohmann::json{{"id", p.sentence->id}, {"change_points", points}}.dump() + "\n";
  }
  WriteFile(fs::path(g.out_dir) / "changes.jsonl", lines);
}

void RunAll(const Globals& g, const std::string& data_dir, const pipeline::PipelineOptions& opts) {
  const model::ModelConfig config = BuildConfig(g);
  const auto data = LoadData(data_dir);
  const auto run = pipeline::RunPipeline(data, config, opts, g.seed);
  const fs::path out(g.out_dir);
  SaveCheckpoint(out / "model.ckpt", run.model.AllParams(), g.seed, config);
  WriteFile(out / "asr_log.csv", pipeline::FormatAsrLog(run.asr_log));
  WriteFile(out / "speaker_log.csv", pipeline::FormatSpeakerLog(run.speaker_log));
  WriteFile(out / "train_log.csv", pipeline::FormatJointLog(run.joint_log));
  Log(Level::kInfo, "speaker accuracy " + std::to_string(run.speaker_accuracy));
  WriteEval(out, run.eval);
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return 2;
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kNonFiniteWeight: return 3;
    case ErrorCode::kEmptySegmentation: return 4;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token-level speaker change detection with continuous integrate-and-fire"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config_path, "Model config JSON; missing keys keep defaults");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--theta-step", g.theta_step, "Threshold sweep step")->capture_default_str();
  app.add_flag("--no-content", g.no_content, "Drop the content cue from the change head");
  app.add_flag("--no-difference", g.no_difference, "Drop the difference cue");
  app.add_flag("--no-sde-conv", g.no_sde_conv, "Replace the difference convolution by FC");
  app.add_option("--context", g.context, "Convolution context radius")
      ->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--frame-shift", g.frame_shift, "Frame shift in seconds")
      ->check(CLI::PositiveNumber);
  app.add_option("--downsampling", g.downsampling, "Encoder downsampling factor")
      ->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset to --out");
  generate->add_option("--sentences", gen.sentences, "Number of sentences")->capture_default_str();
  generate->add_option("--speakers", gen.speakers, "Number of speakers (default: num_classes)");

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Group annotations into a sentence manifest");
  preprocess->add_option("annotations", pre.annotations, "Annotation file")->required();
  preprocess->add_flag("--test-set", pre.policy.test_set, "Also drop sentences without a change");
  preprocess->add_option("--max-members", pre.policy.max_members)->capture_default_str();
  preprocess->add_option("--group-gap", pre.policy.group_gap_s)->capture_default_str();
  preprocess->add_option("--max-overlap", pre.policy.max_overlap_s)->capture_default_str();
  preprocess->add_option("--max-overlap-ratio", pre.policy.max_overlap_ratio)
      ->capture_default_str();
  preprocess->add_option("--max-silence", pre.policy.max_silence_s)->capture_default_str();

  std::string data_dir;
  TrainFlags asr_flags, speaker_flags, train_flags;
  auto* pretrain_asr = app.add_subcommand("pretrain-asr", "Pretrain the toy ASR");
  pretrain_asr->add_option("--data", data_dir, "Dataset directory")->required();
  AddTrainFlags(pretrain_asr, asr_flags, 8000);

  auto* pretrain_speaker = app.add_subcommand("pretrain-speaker", "Pretrain the speaker encoder");
  pretrain_speaker->add_option("--data", data_dir, "Dataset directory")->required();
  AddTrainFlags(pretrain_speaker, speaker_flags, 2000);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Joint training with the ASR frozen");
  train->add_option("--data", tr.data, "Dataset directory")->required();
  train->add_option("--asr", tr.asr, "Pretrained ASR checkpoint");
  train->add_flag("--random-asr", tr.random_asr, "Freeze a randomly initialized ASR");
  train->add_option("--speaker", tr.speaker, "Pretrained speaker encoder checkpoint");
  AddTrainFlags(train, train_flags, 3000);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Sweep thresholds; write curve.csv and ecp.json");
  eval->add_option("--checkpoint", ev.checkpoint, "Model checkpoint")->required();
  eval->add_option("--data", ev.data, "Dataset directory")->required();
  eval->add_flag("--oracle-scores", ev.oracle_scores, "Score tokens with their labels");

  EvalArgs inf;
  auto* infer = app.add_subcommand("infer", "Write scored change points per sentence");
  infer->add_option("--checkpoint", inf.checkpoint, "Model checkpoint")->required();
  infer->add_option("--data", inf.data, "Dataset directory")->required();

  pipeline::PipelineOptions popts;
  auto* all = app.add_subcommand("pipeline", "Pretrain, train and evaluate in one run");
  all->add_option("--data", data_dir, "Dataset directory")->required();
  all->add_option("--asr-steps", popts.asr_steps)->capture_default_str();
  all->add_option("--speaker-steps", popts.speaker_steps)->capture_default_str();
  all->add_option("--joint-steps", popts.joint_steps)->capture_default_str();
  all->add_option("--lr", popts.learning_rate)->capture_default_str();
  all->add_option("--warmup", popts.warmup_steps)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*generate) RunGenerate(g, gen);
    if (*preprocess) RunPreprocess(g, pre);
    if (*pretrain_asr) RunPretrainAsr(g, data_dir, asr_flags);
    if (*pretrain_speaker) RunPretrainSpeaker(g, data_dir, speaker_flags);
    if (*train) RunTrain(g, tr, train_flags);
    if (*eval) RunEval(g, ev);
    if (*infer) RunInfer(g, inf);
    if (*all) {
      popts.theta_step = g.theta_step;
      RunAll(g, data_dir, popts);
    }
  } catch (const Error& e) {
    Log(Level::kError, e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    Log(Level::kError, e.what());
    return 1;
  }
  return 0;
}
