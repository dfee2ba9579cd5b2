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

// Toy-scale token-level speaker change detector.
//
//   frames -> ToyAsr -> (h, alpha, c, o, boundaries)
//   frames -> SpeakerEncoder -> z -> CIF(z, alpha) = e -> m -> v
//   p = Jointer(concat(SDE(m), SCE(c, o)))
//
// The speaker path reuses the ASR alignment as a constant, so both CIF calls
// share boundaries and contribution coefficients. BslBaseline is the
// frame-level comparator.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cifscd/autodiff.hpp"
#include "cifscd/cif.hpp"
#include "cifscd/errors.hpp"
#include "cifscd/metrics.hpp"
#include "cifscd/nn.hpp"
#include "cifscd/tensor.hpp"
#include "json.hpp"

namespace cifscd::model {

using ad::Var;
using nn::Activation;

struct ModelConfig {
  std::size_t feature_dim = 8;
  std::size_t encoder_dim = 16;
  std::size_t speaker_dim = 16;
  std::size_t embedding_dim = 8;
  std::size_t num_classes = 4;
  std::size_t heads = 2;
  std::size_t sce_layers = 1;
  std::size_t ffn_hidden = 32;
  std::size_t sde_dim = 16;
  std::size_t sde_hidden = 32;
  std::size_t jointer_hidden = 32;
  std::size_t vocab_size = 8;
  std::size_t downsampling = 4;
  double frame_shift_s = 0.01;
  double cif_threshold = 1.0;
  std::size_t conv_context = 1;
  bool use_difference = true;
  bool use_content = true;
  bool use_conv_in_sde = true;
  nn::AmsConfig ams;
  double ams_weight = 1.0;
  double bce_weight = 1.0;
  double bsl_collar_s = 0.2;
  std::size_t bsl_hidden = 32;

  void Validate() const {
    Require(use_difference || use_content, ErrorCode::kConfigError,
            "at least one of use_difference / use_content must be enabled");
    Require(conv_context >= 1 && conv_context <= 3, ErrorCode::kConfigError,
            "conv_context must be 1, 2 or 3");
    Require(feature_dim > 0 && encoder_dim > 0 && speaker_dim > 0 && embedding_dim > 0 &&
                sde_dim > 0 && sde_hidden > 0 && jointer_hidden > 0 && ffn_hidden > 0 &&
                bsl_hidden > 0 && vocab_size > 0,
            ErrorCode::kConfigError, "dimensions must be positive");
    Require(heads > 0 && encoder_dim % heads == 0, ErrorCode::kConfigError,
            "heads must divide encoder_dim");
    Require(downsampling >= 1 && frame_shift_s > 0 && cif_threshold > 0,
            ErrorCode::kConfigError, "bad frame geometry or threshold");
    Require(ams_weight >= 0 && bce_weight >= 0, ErrorCode::kConfigError,
            "loss weights must be non-negative");
    Require(bsl_collar_s >= 0, ErrorCode::kConfigError, "negative collar");
    ams.Validate();
    Require(ams.num_classes == num_classes, ErrorCode::kConfigError,
            "ams.num_classes must equal num_classes");
  }
};

inline nlohmann::json ToJson(const ModelConfig& c) {
  return {{"feature_dim", c.feature_dim},
          {"encoder_dim", c.encoder_dim},
          {"speaker_dim", c.speaker_dim},
          {"embedding_dim", c.embedding_dim},
          {"num_classes", c.num_classes},
          {"heads", c.heads},
          {"sce_layers", c.sce_layers},
          {"ffn_hidden", c.ffn_hidden},
          {"sde_dim", c.sde_dim},
          {"sde_hidden", c.sde_hidden},
          {"jointer_hidden", c.jointer_hidden},
          {"vocab_size", c.vocab_size},
          {"downsampling", c.downsampling},
          {"frame_shift_s", c.frame_shift_s},
          {"cif_threshold", c.cif_threshold},
          {"conv_context", c.conv_context},
          {"use_difference", c.use_difference},
          {"use_content", c.use_content},
          {"use_conv_in_sde", c.use_conv_in_sde},
          {"ams", {{"margin", c.ams.margin}, {"scale", c.ams.scale}}},
          {"loss_weights", {c.ams_weight, c.bce_weight}},
          {"bsl_collar_s", c.bsl_collar_s},
          {"bsl_hidden", c.bsl_hidden}};
}

// Overrides defaults with the keys present in `j`; unknown keys are errors.
inline ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  Require(j.is_object(), ErrorCode::kConfigError, "model config must be a JSON object");
  nlohmann::json merged = ToJson(ModelConfig{});
  for (const auto& [key, value] : j.items()) {
    Require(merged.contains(key), ErrorCode::kConfigError, "unknown model config key: " + key);
    if (key == "ams") {
      Require(value.is_object(), ErrorCode::kConfigError, "ams must be an object");
      for (const auto& [k, v] : value.items()) {
        Require(merged["ams"].contains(k), ErrorCode::kConfigError, "unknown ams key: " + k);
        merged["ams"][k] = v;
      }
    } else {
      merged[key] = value;
    }
  }
  ModelConfig c;
  try {
    c.feature_dim = merged["feature_dim"].get<std::size_t>();
    c.encoder_dim = merged["encoder_dim"].get<std::size_t>();
    c.speaker_dim = merged["speaker_dim"].get<std::size_t>();
    c.embedding_dim = merged["embedding_dim"].get<std::size_t>();
    c.num_classes = merged["num_classes"].get<std::size_t>();
    c.heads = merged["heads"].get<std::size_t>();
    c.sce_layers = merged["sce_layers"].get<std::size_t>();
    c.ffn_hidden = merged["ffn_hidden"].get<std::size_t>();
    c.sde_dim = merged["sde_dim"].get<std::size_t>();
    c.sde_hidden = merged["sde_hidden"].get<std::size_t>();
    c.jointer_hidden = merged["jointer_hidden"].get<std::size_t>();
    c.vocab_size = merged["vocab_size"].get<std::size_t>();
    c.downsampling = merged["downsampling"].get<std::size_t>();
    c.frame_shift_s = merged["frame_shift_s"].get<double>();
    c.cif_threshold = merged["cif_threshold"].get<double>();
    c.conv_context = merged["conv_context"].get<std::size_t>();
    c.use_difference = merged["use_difference"].get<bool>();
    c.use_content = merged["use_content"].get<bool>();
    c.use_conv_in_sde = merged["use_conv_in_sde"].get<bool>();
    c.ams.margin = merged["ams"]["margin"].get<double>();
    c.ams.scale = merged["ams"]["scale"].get<double>();
    c.ams.num_classes = c.num_classes;
    const auto w = merged["loss_weights"].get<std::vector<double>>();
    Require(w.size() == 2, ErrorCode::kConfigError, "loss_weights must have two entries");
    c.ams_weight = w[0];
    c.bce_weight = w[1];
    c.bsl_collar_s = merged["bsl_collar_s"].get<double>();
    c.bsl_hidden = merged["bsl_hidden"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("model config: ") + e.what());
  }
  c.Validate();
  return c;
}

// ---- ASR side -------------------------------------------------------------

struct ToyAsrBundle {
  Var encoded_frames;  // h [U, D]
  Var raw_weights;     // alpha before scaling [U, 1]
  Var weights;         // alpha scaled to S * threshold [U, 1]
  CifAlignment alignment;
  Var cif_tokens;      // c [S, D]
  Var decoder_states;  // o [S, D]

  const std::vector<std::size_t>& boundaries() const { return alignment.boundaries; }
  std::size_t token_count() const { return alignment.num_tokens(); }
};

class ToyAsr {
 public:
  ToyAsr(const ModelConfig& config, nn::Rng& rng) : config_(config) {
    const std::size_t D = config.encoder_dim;
    frontend_ = nn::StridedProjection(params_, "asr.frontend", config.feature_dim, D,
                                      config.downsampling, Activation::kRelu, rng);
    encoder1_ = nn::Conv1d(params_, "asr.encoder1", D, D, 3, Activation::kRelu, rng);
    encoder2_ = nn::Conv1d(params_, "asr.encoder2", D, D, 3, Activation::kRelu, rng);
    weight_conv_ = nn::Conv1d(params_, "asr.weight_conv", D, D, 3, Activation::kRelu, rng);
    weight_fc_ = nn::Linear(params_, "asr.weight_fc", D, 1, Activation::kSigmoid, rng);
    decoder_ = nn::TransformerLayer(params_, "asr.decoder", D, config.heads, config.ffn_hidden, rng);
    vocab_ = nn::Linear(params_, "asr.vocab", D, config.vocab_size, Activation::kNone, rng);
  }

  // Two residual conv layers over the downsampled frames.
  Var Encode(const Tensor& frames) const {
    Require(frames.rank() == 2 && frames.cols() == config_.feature_dim, ErrorCode::kShapeMismatch,
            "ASR input must be [T, " + std::to_string(config_.feature_dim) + "]");
    Require(frames.rows() >= config_.downsampling, ErrorCode::kEmptyInput,
            "input shorter than one downsampled frame");
    const Var x = frontend_.Forward(ad::Constant(frames));
    const Var h1 = ad::Add(x, encoder1_.Forward(x));
    return ad::Add(h1, encoder2_.Forward(h1));
  }

  Var EstimateWeights(const Var& h) const {
    return weight_fc_.Forward(weight_conv_.Forward(h));
  }

  ToyAsrBundle Forward(const Tensor& frames, std::size_t token_count) const {
    Require(token_count >= 1, ErrorCode::kInvalidArgument, "token_count must be positive");
    ToyAsrBundle b;
    b.encoded_frames = Encode(frames);
    b.raw_weights = EstimateWeights(b.encoded_frames);
    CifConfig cif{config_.cif_threshold, CifMode::kTrain};
    b.alignment = ComputeAlignment(b.raw_weights.value().values(), cif, token_count);
    b.weights = nn::ScaleToLength(b.raw_weights,
                                  static_cast<double>(token_count) * config_.cif_threshold,
                                  cif.scale_epsilon);
    b.cif_tokens = nn::CifIntegrate(b.encoded_frames, b.alignment, b.weights);
    b.decoder_states = decoder_.Forward(b.cif_tokens);
    return b;
  }

  // Token-content logits used by ASR pretraining.
  Var VocabLogits(const ToyAsrBundle& b) const { return vocab_.Forward(b.decoder_states); }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  nn::Linear& weight_fc() { return weight_fc_; }

 private:
  ModelConfig config_;
  nn::ParameterSet params_;
  nn::StridedProjection frontend_;
  nn::Conv1d encoder1_, encoder2_, weight_conv_;
  nn::Linear weight_fc_, vocab_;
  nn::TransformerLayer decoder_;
};

// ---- Speaker side ---------------------------------------------------------

class SpeakerEncoder {
 public:
  SpeakerEncoder(const ModelConfig& config, nn::Rng& rng) : config_(config) {
    const std::size_t Dz = config.speaker_dim;
    frontend_ = nn::StridedProjection(params_, "spk.frontend", config.feature_dim, Dz,
                                      config.downsampling, Activation::kRelu, rng);
    encoder_ = nn::Conv1d(params_, "spk.encoder", Dz, Dz, 3, Activation::kRelu, rng);
    pool_fc_ = nn::Linear(pretrain_params_, "spk.pool_fc", Dz, config.num_classes,
                          Activation::kNone, rng);
  }

  // z [U, Dz] with the same downsampling as the ASR encoder.
  Var Forward(const Tensor& frames) const {
    Require(frames.rank() == 2 && frames.cols() == config_.feature_dim, ErrorCode::kShapeMismatch,
            "speaker encoder input must be [T, " + std::to_string(config_.feature_dim) + "]");
    Require(frames.rows() >= config_.downsampling, ErrorCode::kEmptyInput,
            "input shorter than one downsampled frame");
    const Var x = frontend_.Forward(ad::Constant(frames));
    return ad::Add(x, encoder_.Forward(x));
  }

  // Utterance-level logits through average pooling; pretraining only.
  Var PooledLogits(const Var& z) const { return pool_fc_.Forward(ad::MeanRows(z)); }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  // The pooling classifier, discarded after pretraining.
  nn::ParameterSet& pretrain_params() { return pretrain_params_; }

 private:
  ModelConfig config_;
  nn::ParameterSet params_, pretrain_params_;
  nn::StridedProjection frontend_;
  nn::Conv1d encoder_;
  nn::Linear pool_fc_;
};

class SpeakerClassifier {
 public:
  SpeakerClassifier(const ModelConfig& config, nn::Rng& rng) : config_(config) {
    embed_ = nn::Linear(params_, "cls.embed", config.speaker_dim, config.embedding_dim,
                        Activation::kRelu, rng);
    class_weights_ = params_.Add(
        "cls.class_weights",
        nn::InitUniform(rng, config.num_classes, config.embedding_dim, config.embedding_dim));
  }

  Var Embed(const Var& e) const { return embed_.Forward(e); }
  Var Posteriors(const Var& m) const {
    return ad::SoftmaxRows(nn::CosineLogits(m, class_weights_, config_.ams.scale));
  }
  const Var& class_weights() const { return class_weights_; }
  Var& class_weights() { return class_weights_; }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

 private:
  ModelConfig config_;
  nn::ParameterSet params_;
  nn::Linear embed_;
  Var class_weights_;
};

struct SpeakerPath {
  Var speaker_frames;      // z [U, Dz]
  Var token_speaker_reps;  // e [S, Dz]
  Var embeddings;          // m [S, De]
  Var posteriors;          // v [S, C]
};

// e = CIF(z, alpha) with the ASR alignment held constant.
inline SpeakerPath SpeakerPathForward(const SpeakerEncoder& encoder,
                                      const SpeakerClassifier& classifier, const Tensor& frames,
                                      const CifAlignment& alignment) {
  SpeakerPath p;
  p.speaker_frames = encoder.Forward(frames);
  Require(p.speaker_frames.rows() == alignment.num_frames(), ErrorCode::kShapeMismatch,
          "speaker frames (" + std::to_string(p.speaker_frames.rows()) +
              ") differ from weight count (" + std::to_string(alignment.num_frames()) + ")");
  p.token_speaker_reps = nn::CifIntegrate(p.speaker_frames, alignment);
  p.embeddings = classifier.Embed(p.token_speaker_reps);
  p.posteriors = classifier.Posteriors(p.embeddings);
  return p;
}

// Same, from raw weights scaled to `token_count` tokens.
inline SpeakerPath SpeakerPathForward(const SpeakerEncoder& encoder,
                                      const SpeakerClassifier& classifier, const Tensor& frames,
                                      const std::vector<double>& weights, std::size_t token_count,
                                      double threshold = 1.0) {
  const Var z = encoder.Forward(frames);
  Require(z.rows() == weights.size(), ErrorCode::kShapeMismatch,
          "speaker frames differ from weight count");
  return SpeakerPathForward(encoder, classifier, frames,
                            ComputeAlignment(weights, {threshold, CifMode::kTrain}, token_count));
}

// ---- SCD head -------------------------------------------------------------

class ScdHead {
 public:
  ScdHead(const ModelConfig& config, nn::Rng& rng) : config_(config) {
    config.Validate();
    std::size_t joint_in = 0;
    if (config.use_difference) {
      if (config.use_conv_in_sde) {
        sde_conv_ = nn::Conv1d(params_, "head.sde_conv", config.embedding_dim,
                               config.embedding_dim, 2 * config.conv_context + 1,
                               Activation::kNone, rng);
      }
      sde_ffn_ = nn::Ffn(params_, "head.sde_ffn", config.embedding_dim, config.sde_hidden,
                         config.sde_dim, rng);
      joint_in += config.sde_dim;
    }
    if (config.use_content) {
      const std::size_t D = config.encoder_dim;
      sce_fc_ = nn::Linear(params_, "head.sce_fc", 2 * D, D, Activation::kNone, rng);
      for (std::size_t i = 0; i < config.sce_layers; ++i) {
        sce_layers_.emplace_back(params_, "head.sce" + std::to_string(i), D, config.heads,
                                 config.ffn_hidden, rng);
      }
      joint_in += D;
    }
    joint_hidden_ = nn::Linear(params_, "head.joint_hidden", joint_in, config.jointer_hidden,
                               Activation::kRelu, rng);
    joint_out_ = nn::Linear(params_, "head.joint_out", config.jointer_hidden, 1,
                            Activation::kSigmoid, rng);
  }

  // Convolved embeddings fed to the difference FFN (m itself without conv).
  Var DifferenceFeatures(const Var& m) const {
    return config_.use_conv_in_sde ? sde_conv_.Forward(m) : m;
  }

  Var Difference(const Var& m) const { return sde_ffn_.Forward(DifferenceFeatures(m)); }

  Var Content(const Var& c, const Var& o) const {
    Var l = sce_fc_.Forward(ad::ConcatCols({c, o}));
    for (const auto& layer : sce_layers_) l = layer.Forward(l);
    return l;
  }

  // Change probabilities p [S, 1]. Disabled cues are never computed.
  Var Forward(const Var& c, const Var& o, const Var& m) const {
    std::vector<Var> cues;
    if (config_.use_difference) cues.push_back(Difference(m));
    if (config_.use_content) {
      Require(c.rows() == m.rows() && o.rows() == m.rows(), ErrorCode::kShapeMismatch,
              "content and speaker token counts differ");
      cues.push_back(Content(c, o));
    }
    const Var joint = cues.size() == 1 ? cues.front() : ad::ConcatCols(cues);
    return joint_out_.Forward(joint_hidden_.Forward(joint));
  }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  nn::Conv1d& sde_conv() { return sde_conv_; }
  nn::Linear& joint_out() { return joint_out_; }

 private:
  ModelConfig config_;
  nn::ParameterSet params_;
  nn::Conv1d sde_conv_;
  nn::Ffn sde_ffn_;
  nn::Linear sce_fc_;
  std::vector<nn::TransformerLayer> sce_layers_;
  nn::Linear joint_hidden_, joint_out_;
};

inline Var ScdForward(const ToyAsrBundle& bundle, const SpeakerPath& path, const ScdHead& head) {
  Require(bundle.token_count() == path.embeddings.rows(), ErrorCode::kShapeMismatch,
          "ASR and speaker token counts differ");
  return head.Forward(bundle.cif_tokens, bundle.decoder_states, path.embeddings);
}

// ---- Joint loss -----------------------------------------------------------

struct JointLoss {
  Var total;
  double ams = 0;
  double bce = 0;
};

// w_ams * AMS(m, speaker labels) + w_bce * BCE(p, change labels). A term
// with zero weight is left out of the graph.
inline JointLoss ComputeJointLoss(const Var& embeddings, const Var& class_weights,
                                  const Var& scores, const std::vector<std::size_t>& speaker_labels,
                                  const std::vector<int>& change_labels, const nn::AmsConfig& ams,
                                  double ams_weight, double bce_weight) {
  Require(embeddings.rows() == speaker_labels.size() && scores.rows() == change_labels.size() &&
              scores.rows() == embeddings.rows(),
          ErrorCode::kShapeMismatch, "joint loss: label and token counts differ");
  Require(ams_weight > 0 || bce_weight > 0, ErrorCode::kConfigError,
          "joint loss needs a positive weight");
  const Var a = AmSoftmaxLoss(embeddings, speaker_labels, class_weights, ams);
  const Var b = ad::BinaryCrossEntropy(scores, change_labels);
  JointLoss out;
  out.ams = a.scalar();
  out.bce = b.scalar();
  if (ams_weight == 0) {
    out.total = ad::Scale(b, bce_weight);
  } else if (bce_weight == 0) {
    out.total = ad::Scale(a, ams_weight);
  } else {
    out.total = ad::Add(ad::Scale(a, ams_weight), ad::Scale(b, bce_weight));
  }
  return out;
}

// ---- Token decisions to time ----------------------------------------------

// Change candidate after token i at (boundaries[i] + 1) * downsampling *
// frame_shift_s. Tokens fired by the same frame share a time; the highest
// score is kept.
inline metrics::ScoredChangePoints TokensToChangeTimes(const std::vector<std::size_t>& boundaries,
                                                       const std::vector<double>& scores,
                                                       double frame_shift_s,
                                                       std::size_t downsampling) {
  Require(boundaries.size() == scores.size(), ErrorCode::kShapeMismatch,
          "one score per boundary required");
  std::vector<metrics::ChangePoint> points;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    Require(i == 0 || boundaries[i - 1] <= boundaries[i], ErrorCode::kInvalidArgument,
            "boundaries must be sorted");
    if (i > 0 && boundaries[i] == boundaries[i - 1]) {
      points.back().score = std::max(points.back().score, scores[i]);
      continue;
    }
    points.push_back({static_cast<double>(boundaries[i] + 1) *
                          static_cast<double>(downsampling) * frame_shift_s,
                      scores[i]});
  }
  return metrics::ScoredChangePoints(std::move(points));
}

// ---- Full model -----------------------------------------------------------

struct ScdModel {
  ModelConfig config;
  nn::Rng init_rng;
  ToyAsr asr;
  SpeakerEncoder speaker;
  SpeakerClassifier classifier;
  ScdHead head;

  ScdModel(const ModelConfig& c, std::uint64_t seed)
      : config((c.Validate(), c)),
        init_rng(seed),
        asr(config, init_rng),
        speaker(config, init_rng),
        classifier(config, init_rng),
        head(config, init_rng) {}

  // Every persistent parameter: ASR, speaker encoder, classifier, head.
  nn::ParameterSet AllParams() const {
    nn::ParameterSet all;
    all.Extend(asr.params());
    all.Extend(speaker.params());
    all.Extend(classifier.params());
    all.Extend(head.params());
    return all;
  }

  // Parameters updated by joint training; the ASR side stays frozen.
  nn::ParameterSet JointParams() const {
    nn::ParameterSet p;
    p.Extend(speaker.params());
    p.Extend(classifier.params());
    p.Extend(head.params());
    return p;
  }
};

// ---- Frame-level baseline -------------------------------------------------

class BslBaseline {
 public:
  BslBaseline(const ModelConfig& config, nn::Rng& rng) : config_(config) {
    const std::size_t D = config.encoder_dim;
    frontend_ = nn::StridedProjection(params_, "bsl.frontend", config.feature_dim, D,
                                      config.downsampling, Activation::kRelu, rng);
    encoder1_ = nn::Conv1d(params_, "bsl.encoder1", D, D, 3, Activation::kRelu, rng);
    encoder2_ = nn::Conv1d(params_, "bsl.encoder2", D, D, 3, Activation::kRelu, rng);
    hidden_ = nn::Linear(params_, "bsl.hidden", D, config.bsl_hidden, Activation::kRelu, rng);
    out_ = nn::Linear(params_, "bsl.out", config.bsl_hidden, 1, Activation::kSigmoid, rng);
  }

  // Per-frame change scores [U, 1], U = T / downsampling.
  Var Forward(const Tensor& frames) const {
    Require(frames.rank() == 2 && frames.cols() == config_.feature_dim, ErrorCode::kShapeMismatch,
            "baseline input must be [T, " + std::to_string(config_.feature_dim) + "]");
    Require(frames.rows() >= config_.downsampling, ErrorCode::kEmptyInput,
            "input shorter than one downsampled frame");
    const Var x = frontend_.Forward(ad::Constant(frames));
    const Var h1 = ad::Add(x, encoder1_.Forward(x));
    const Var h = ad::Add(h1, encoder2_.Forward(h1));
    return out_.Forward(hidden_.Forward(h));
  }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  nn::Linear& out() { return out_; }

 private:
  ModelConfig config_;
  nn::ParameterSet params_;
  nn::StridedProjection frontend_;
  nn::Conv1d encoder1_, encoder2_;
  nn::Linear hidden_, out_;
};

// Frame u (ending at (u + 1) * downsampling * shift) is positive when it
// lies within `collar` seconds of a reference change time.
inline std::vector<int> BslFrameLabels(const std::vector<double>& change_times,
                                       std::size_t num_frames, double frame_shift_s,
                                       std::size_t downsampling, double collar_s) {
  std::vector<int> labels(num_frames, 0);
  for (std::size_t u = 0; u < num_frames; ++u) {
    const double t = static_cast<double>(u + 1) * static_cast<double>(downsampling) * frame_shift_s;
    for (double c : change_times)
      if (std::abs(t - c) <= collar_s + 1e-9) labels[u] = 1;
  }
  return labels;
}

// Local maxima of the frame score sequence as candidate change points.
inline metrics::ScoredChangePoints PeakPick(const std::vector<double>& scores,
                                            double frame_shift_s, std::size_t downsampling) {
  std::vector<metrics::ChangePoint> points;
  for (std::size_t u = 0; u < scores.size(); ++u) {
    const bool left = u == 0 || scores[u] > scores[u - 1];
    const bool right = u + 1 == scores.size() || scores[u] >= scores[u + 1];
    if (left && right) {
      points.push_back({static_cast<double>(u + 1) * static_cast<double>(downsampling) *
                            frame_shift_s,
                        scores[u]});
    }
  }
  return metrics::ScoredChangePoints(std::move(points));
}

}  // namespace cifscd::model
