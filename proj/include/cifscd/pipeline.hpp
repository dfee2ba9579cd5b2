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

// Training stages and corpus-level evaluation on synthetic datasets.
//
//   PretrainAsr      token-content cross-entropy, quantity loss, and a squared
//                    error pulling the weights toward the known token ends
//   PretrainSpeaker  utterance classification through average pooling
//   TrainJoint       AMSoftmax + BCE with the ASR side frozen
//   Evaluate         threshold sweep and ECP over the whole dataset
//
// All stages draw sentences from a seeded shuffle, so a fixed seed gives
// identical parameter trajectories.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cifscd/corpus.hpp"
#include "cifscd/errors.hpp"
#include "cifscd/metrics.hpp"
#include "cifscd/model.hpp"
#include "cifscd/nn.hpp"
#include "cifscd/optim.hpp"
#include "cifscd/synthetic.hpp"
#include "json.hpp"

namespace cifscd::pipeline {

using corpus::SyntheticSentence;
using model::ScdModel;

struct TrainOptions {
  std::size_t steps = 1000;
  double learning_rate = 1e-3;
  std::size_t warmup_steps = 100;
  std::uint64_t seed = 1;
};

// Visits indices 0..n-1 in a fresh seeded permutation each epoch.
class EpochSampler {
 public:
  EpochSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    Require(n > 0, ErrorCode::kEmptyInput, "no training examples");
  }
  std::size_t Next() {
    if (pos_ == 0) {
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng_.Index(i)]);
    }
    const std::size_t out = order_[pos_];
    pos_ = (pos_ + 1) % order_.size();
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  nn::Rng rng_;
  std::size_t pos_ = 0;
};

inline void CheckFinite(double loss, std::size_t step) {
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFiniteLoss, "non-finite loss at step " + std::to_string(step));
  }
}

// Speaker names sorted, mapped to class ids.
inline std::map<std::string, std::size_t> SpeakerIndex(
    const std::vector<SyntheticSentence>& sentences, std::size_t num_classes) {
  std::map<std::string, std::size_t> index;
  for (const auto& s : sentences)
    for (const auto& seg : s.reference.segments()) index.emplace(seg.label, 0);
  Require(index.size() <= num_classes, ErrorCode::kConfigError,
          "dataset has " + std::to_string(index.size()) + " speakers but the model has " +
              std::to_string(num_classes) + " classes");
  std::size_t k = 0;
  for (auto& [_, id] : index) id = k++;
  return index;
}

inline void CheckGeometry(const model::ModelConfig& config, const SyntheticSentence& s) {
  Require(s.downsampling == config.downsampling &&
              std::abs(s.frame_shift_s - config.frame_shift_s) < 1e-12,
          ErrorCode::kConfigError, "dataset frame geometry differs from the model config");
  Require(s.frames.cols() == config.feature_dim, ErrorCode::kShapeMismatch,
          "dataset feature width differs from the model config");
}

// ---- ASR pretraining ------------------------------------------------------

struct AsrLogRow {
  std::size_t step = 0;
  double ce_loss = 0;
  double quantity_loss = 0;
  double weight_loss = 0;
};

inline std::string FormatAsrLog(const std::vector<AsrLogRow>& log) {
  std::string out = "step,ce_loss,quantity_loss,weight_loss\n";
  char line[128];
  for (const auto& r : log) {
    std::snprintf(line, sizeof(line), "%zu,%.9f,%.9f,%.9f\n", r.step, r.ce_loss,
                  r.quantity_loss, r.weight_loss);
    out += line;
  }
  return out;
}

// Share of a token's unit weight placed on its first downsampled frame; the
// rest sits on its last frame. Each token carries exactly one unit, and a
// firing that falls just short completes on the next token's first frame.
inline constexpr double kWeightTargetOnset = 0.2;

// Per-frame information-weight target for ASR pretraining, shape [U, 1].
inline Tensor WeightTarget(const SyntheticSentence& s) {
  Tensor target = Tensor::Matrix(s.frames.rows() / s.downsampling, 1);
  std::size_t begin = 0;
  for (std::size_t end : s.token_end_frames) {
    target.at(begin, 0) += kWeightTargetOnset;
    target.at(end / s.downsampling - 1, 0) += 1.0 - kWeightTargetOnset;
    begin = end / s.downsampling;
  }
  return target;
}

inline std::vector<AsrLogRow> PretrainAsr(ScdModel& model,
                                          const std::vector<SyntheticSentence>& sentences,
                                          const TrainOptions& opts) {
  for (const auto& s : sentences) CheckGeometry(model.config, s);
  optim::Adam adam(model.asr.params(), {opts.learning_rate, opts.warmup_steps});
  EpochSampler sampler(sentences.size(), opts.seed);
  std::vector<AsrLogRow> log;
  for (std::size_t step = 0; step < opts.steps; ++step) {
    const SyntheticSentence& s = sentences[sampler.Next()];
    const auto bundle = model.asr.Forward(s.frames, s.token_count());
    const ad::Var ce = ad::CrossEntropyRows(model.asr.VocabLogits(bundle), s.token_contents);
    const ad::Var quantity = nn::QuantityLossOp(bundle.raw_weights, s.token_count());
    const ad::Var diff = ad::Sub(bundle.raw_weights, ad::Constant(WeightTarget(s)));
    const ad::Var weight = ad::Sum(ad::Mul(diff, diff));
    const ad::Var loss = ad::Add(ad::Add(ce, quantity), weight);
    CheckFinite(loss.scalar(), step);
    adam.ZeroGrad();
    ad::Backward(loss);
    adam.Step();
    log.push_back({step, ce.scalar(), quantity.scalar(), weight.scalar()});
  }
  return log;
}

// ---- Speaker pretraining --------------------------------------------------

struct Utterance {
  Tensor frames;
  std::size_t label = 0;
};

// Single-speaker turns cut from the reference segmentation.
inline std::vector<Utterance> SpeakerUtterances(const std::vector<SyntheticSentence>& sentences,
                                                const std::map<std::string, std::size_t>& index,
                                                std::size_t min_frames) {
  std::vector<Utterance> out;
  for (const auto& s : sentences) {
    for (const auto& seg : s.reference.segments()) {
      const auto begin = static_cast<std::size_t>(std::llround(seg.start / s.frame_shift_s));
      const auto end = std::min<std::size_t>(
          s.frames.rows(), static_cast<std::size_t>(std::llround(seg.end / s.frame_shift_s)));
      if (end < begin + min_frames) continue;
      Utterance u{Tensor::Matrix(end - begin, s.frames.cols()), index.at(seg.label)};
      for (std::size_t t = begin; t < end; ++t)
        std::copy(s.frames.row(t).begin(), s.frames.row(t).end(), u.frames.row(t - begin).begin());
      out.push_back(std::move(u));
    }
  }
  return out;
}

struct SpeakerLogRow {
  std::size_t step = 0;
  double ce_loss = 0;
};

inline std::string FormatSpeakerLog(const std::vector<SpeakerLogRow>& log) {
  std::string out = "step,ce_loss\n";
  char line[64];
  for (const auto& r : log) {
    std::snprintf(line, sizeof(line), "%zu,%.9f\n", r.step, r.ce_loss);
    out += line;
  }
  return out;
}

inline std::vector<SpeakerLogRow> PretrainSpeaker(ScdModel& model,
                                                  const std::vector<Utterance>& utterances,
                                                  const TrainOptions& opts) {
  nn::ParameterSet trainable = model.speaker.params();
  trainable.Extend(model.speaker.pretrain_params());
  optim::Adam adam(trainable, {opts.learning_rate, opts.warmup_steps});
  EpochSampler sampler(utterances.size(), opts.seed);
  std::vector<SpeakerLogRow> log;
  for (std::size_t step = 0; step < opts.steps; ++step) {
    const Utterance& u = utterances[sampler.Next()];
    const ad::Var logits = model.speaker.PooledLogits(model.speaker.Forward(u.frames));
    const ad::Var loss = ad::CrossEntropyRows(logits, {u.label});
    CheckFinite(loss.scalar(), step);
    adam.ZeroGrad();
    ad::Backward(loss);
    adam.Step();
    log.push_back({step, loss.scalar()});
  }
  return log;
}

inline double SpeakerAccuracy(const ScdModel& model, const std::vector<Utterance>& utterances) {
  Require(!utterances.empty(), ErrorCode::kEmptyInput, "no utterances");
  std::size_t correct = 0;
  for (const auto& u : utterances) {
    const auto logits = model.speaker.PooledLogits(model.speaker.Forward(u.frames)).value();
    const auto row = logits.row(0);
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    correct += best == u.label;
  }
  return static_cast<double>(correct) / static_cast<double>(utterances.size());
}

// ---- Joint training -------------------------------------------------------

// A sentence with the frozen ASR outputs and the token labels derived from
// its boundaries.
struct PreparedSentence {
  const SyntheticSentence* sentence = nullptr;
  CifAlignment alignment;
  Tensor cif_tokens;
  Tensor decoder_states;
  std::vector<std::size_t> speaker_labels;
  std::vector<int> change_labels;
  double quantity_loss = 0;
};

inline std::vector<PreparedSentence> Prepare(const ScdModel& model,
                                             const std::vector<SyntheticSentence>& sentences,
                                             const std::map<std::string, std::size_t>& index) {
  std::vector<PreparedSentence> out;
  for (const auto& s : sentences) {
    CheckGeometry(model.config, s);
    const auto bundle = model.asr.Forward(s.frames, s.token_count());
    PreparedSentence p;
    p.sentence = &s;
    p.alignment = bundle.alignment;
    p.cif_tokens = bundle.cif_tokens.value();
    p.decoder_states = bundle.decoder_states.value();
    p.quantity_loss = QuantityLoss(bundle.raw_weights.value().values(), s.token_count());
    const auto labels = corpus::DeriveTokenLabels(s.reference, bundle.boundaries(),
                                                  s.frame_shift_s, s.downsampling);
    for (const auto& name : labels.speakers) p.speaker_labels.push_back(index.at(name));
    p.change_labels = labels.changes;
    out.push_back(std::move(p));
  }
  return out;
}

struct JointLogRow {
  std::size_t step = 0;
  double ams_loss = 0;
  double bce_loss = 0;
  double quantity_loss = 0;
};

inline std::string FormatJointLog(const std::vector<JointLogRow>& log) {
  std::string out = "step,ams_loss,bce_loss,quantity_loss\n";
  char line[128];
  for (const auto& r : log) {
    std::snprintf(line, sizeof(line), "%zu,%.9f,%.9f,%.9f\n", r.step, r.ams_loss, r.bce_loss,
                  r.quantity_loss);
    out += line;
  }
  return out;
}

struct Forwarded {
  model::SpeakerPath path;
  ad::Var scores;
};

inline Forwarded ForwardPrepared(const ScdModel& model, const PreparedSentence& p) {
  Forwarded f;
  f.path = model::SpeakerPathForward(model.speaker, model.classifier, p.sentence->frames,
                                     p.alignment);
  f.scores = model.head.Forward(ad::Constant(p.cif_tokens), ad::Constant(p.decoder_states),
                                f.path.embeddings);
  return f;
}

inline std::vector<JointLogRow> TrainJoint(ScdModel& model,
                                           const std::vector<PreparedSentence>& prepared,
                                           const TrainOptions& opts) {
  optim::Adam adam(model.JointParams(), {opts.learning_rate, opts.warmup_steps});
  EpochSampler sampler(prepared.size(), opts.seed);
  std::vector<JointLogRow> log;
  for (std::size_t step = 0; step < opts.steps; ++step) {
    const PreparedSentence& p = prepared[sampler.Next()];
    const Forwarded f = ForwardPrepared(model, p);
    const auto loss = model::ComputeJointLoss(
        f.path.embeddings, model.classifier.class_weights(), f.scores, p.speaker_labels,
        p.change_labels, model.config.ams, model.config.ams_weight, model.config.bce_weight);
    CheckFinite(loss.total.scalar(), step);
    adam.ZeroGrad();
    ad::Backward(loss.total);
    adam.Step();
    log.push_back({step, loss.ams, loss.bce, p.quantity_loss});
  }
  return log;
}

// ---- Evaluation -----------------------------------------------------------

struct EvalResult {
  std::vector<metrics::CurvePoint> curve;
  metrics::EcpResult ecp;
};

inline std::vector<double> ScoreSentence(const ScdModel& model, const PreparedSentence& p) {
  return ForwardPrepared(model, p).scores.value().values();
}

inline metrics::ScoredDocument MakeDocument(const PreparedSentence& p,
                                            const std::vector<double>& scores) {
  const SyntheticSentence& s = *p.sentence;
  return {{0.0, s.duration_s()},
          model::TokensToChangeTimes(p.alignment.boundaries, scores, s.frame_shift_s,
                                     s.downsampling),
          s.reference};
}

// Scores every sentence (or uses its derived change labels as scores when
// `oracle_scores`) and sweeps theta over the whole dataset.
inline EvalResult Evaluate(const ScdModel& model, const std::vector<PreparedSentence>& prepared,
                           const metrics::SweepConfig& sweep, bool oracle_scores = false) {
  std::vector<metrics::ScoredDocument> docs;
  for (const auto& p : prepared) {
    std::vector<double> scores;
    if (oracle_scores) {
      scores.assign(p.change_labels.begin(), p.change_labels.end());
    } else {
      scores = ScoreSentence(model, p);
    }
    docs.push_back(MakeDocument(p, scores));
  }
  EvalResult r;
  r.curve = metrics::SweepCurve(docs, sweep);
  r.ecp = metrics::Ecp(r.curve);
  return r;
}

// ---- Frame-level baseline -------------------------------------------------

inline std::vector<double> BslTrain(model::BslBaseline& bsl, const model::ModelConfig& config,
                                    const std::vector<SyntheticSentence>& sentences,
                                    const TrainOptions& opts) {
  optim::Adam adam(bsl.params(), {opts.learning_rate, opts.warmup_steps});
  EpochSampler sampler(sentences.size(), opts.seed);
  std::vector<double> log;
  for (std::size_t step = 0; step < opts.steps; ++step) {
    const SyntheticSentence& s = sentences[sampler.Next()];
    const ad::Var scores = bsl.Forward(s.frames);
    const auto labels = model::BslFrameLabels(s.reference.ChangeTimes(), scores.rows(),
                                              s.frame_shift_s, s.downsampling, config.bsl_collar_s);
    const ad::Var loss = ad::BinaryCrossEntropy(scores, labels);
    CheckFinite(loss.scalar(), step);
    adam.ZeroGrad();
    ad::Backward(loss);
    adam.Step();
    log.push_back(loss.scalar());
  }
  return log;
}

inline EvalResult BslEvaluate(const model::BslBaseline& bsl,
                              const std::vector<SyntheticSentence>& sentences,
                              const metrics::SweepConfig& sweep) {
  std::vector<metrics::ScoredDocument> docs;
  for (const auto& s : sentences) {
    const auto scores = bsl.Forward(s.frames).value().values();
    docs.push_back({{0.0, s.duration_s()},
                    model::PeakPick(scores, s.frame_shift_s, s.downsampling),
                    s.reference});
  }
  EvalResult r;
  r.curve = metrics::SweepCurve(docs, sweep);
  r.ecp = metrics::Ecp(r.curve);
  return r;
}

// ---- Whole pipeline -------------------------------------------------------

struct PipelineOptions {
  std::size_t asr_steps = 8000;
  std::size_t speaker_steps = 2000;
  std::size_t joint_steps = 3000;
  double learning_rate = 1e-3;
  std::size_t warmup_steps = 100;
  double theta_step = 0.01;

  nlohmann::json ToJson() const {
    return {{"asr_steps", asr_steps},         {"speaker_steps", speaker_steps},
            {"joint_steps", joint_steps},     {"learning_rate", learning_rate},
            {"warmup_steps", warmup_steps},   {"theta_step", theta_step}};
  }
};

struct PipelineRun {
  ScdModel model;
  std::vector<AsrLogRow> asr_log;
  std::vector<SpeakerLogRow> speaker_log;
  std::vector<JointLogRow> joint_log;
  double speaker_accuracy = 0;
  EvalResult eval;
};

// ASR pretraining, speaker pretraining, joint training and evaluation on the
// same sentences. Every stage seed derives from `seed`.
inline PipelineRun RunPipeline(const std::vector<SyntheticSentence>& sentences,
                               const model::ModelConfig& config, const PipelineOptions& opts,
                               std::uint64_t seed) {
  PipelineRun run{ScdModel(config, seed), {}, {}, {}, 0, {}};
  ScdModel& m = run.model;
  const auto index = SpeakerIndex(sentences, config.num_classes);
  run.asr_log = PretrainAsr(m, sentences, {opts.asr_steps, opts.learning_rate,
                                           opts.warmup_steps, seed + 1});
  const auto utterances = SpeakerUtterances(sentences, index, config.downsampling);
  run.speaker_log = PretrainSpeaker(m, utterances, {opts.speaker_steps, opts.learning_rate,
                                                    opts.warmup_steps, seed + 2});
  run.speaker_accuracy = SpeakerAccuracy(m, utterances);
  const auto prepared = Prepare(m, sentences, index);
  run.joint_log = TrainJoint(m, prepared, {opts.joint_steps, opts.learning_rate,
                                           opts.warmup_steps, seed + 3});
  run.eval = Evaluate(m, prepared, metrics::SweepConfig::Uniform(opts.theta_step));
  return run;
}

}  // namespace cifscd::pipeline
