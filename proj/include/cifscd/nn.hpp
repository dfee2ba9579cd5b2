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

// Neural building blocks on top of the autodiff core: parameter registry,
// fully connected / convolution / attention layers, CIF as a graph op and the
// two training losses (additive-margin softmax and binary cross-entropy).

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cifscd/autodiff.hpp"
#include "cifscd/cif.hpp"
#include "cifscd/errors.hpp"
#include "cifscd/tensor.hpp"

namespace cifscd::nn {

using ad::Var;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double Normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  std::size_t Index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  bool Bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Named, ordered collection of trainable leaves. Layers register into it at
// construction; optimizers and checkpoints iterate it in insertion order.
class ParameterSet {
 public:
  Var Add(const std::string& name, Tensor init) {
    for (const auto& [existing, _] : entries_) {
      Require(existing != name, ErrorCode::kConfigError, "duplicate parameter " + name);
    }
    if (init.rank() == 1) init = Tensor({1, init.size()}, init.values());
    Var v = Var::Leaf(std::move(init));
    entries_.emplace_back(name, v);
    return v;
  }

  // Appends another set's entries (sharing the same leaves).
  void Extend(const ParameterSet& other) {
    for (const auto& [name, v] : other.entries_) {
      Require(Find(name) == nullptr, ErrorCode::kConfigError, "duplicate parameter " + name);
      entries_.emplace_back(name, v);
    }
  }

  const Var* Find(const std::string& name) const {
    for (const auto& [n, v] : entries_)
      if (n == name) return &v;
    return nullptr;
  }

  std::vector<std::pair<std::string, Var>>& entries() { return entries_; }
  const std::vector<std::pair<std::string, Var>>& entries() const { return entries_; }

  void ZeroGrad() {
    for (auto& [_, v] : entries_) v.ZeroGrad();
  }

  std::size_t NumScalars() const {
    std::size_t n = 0;
    for (const auto& [_, v] : entries_) n += v.value().size();
    return n;
  }

  std::vector<double> Flatten() const {
    std::vector<double> out;
    for (const auto& [_, v] : entries_)
      out.insert(out.end(), v.value().values().begin(), v.value().values().end());
    return out;
  }

  void Unflatten(const std::vector<double>& flat) {
    Require(flat.size() == NumScalars(), ErrorCode::kShapeMismatch, "Unflatten: size");
    std::size_t k = 0;
    for (auto& [_, v] : entries_)
      for (double& x : v.mutable_value().values()) x = flat[k++];
  }

  std::vector<double> FlattenGrad() const {
    std::vector<double> out;
    for (const auto& [_, v] : entries_) out.insert(out.end(), v.grad().begin(), v.grad().end());
    return out;
  }

 private:
  std::vector<std::pair<std::string, Var>> entries_;
};

enum class Activation { kNone, kRelu, kSigmoid };

inline Var Activate(const Var& x, Activation act) {
  switch (act) {
    case Activation::kRelu: return ad::Relu(x);
    case Activation::kSigmoid: return ad::Sigmoid(x);
    case Activation::kNone: break;
  }
  return x;
}

enum class LayerKind { kFC, kConv1d, kFFN, kCausalSelfAttention };

struct LayerSpec {
  LayerKind kind = LayerKind::kFC;
  std::size_t in_dim = 1;
  std::size_t out_dim = 1;
  std::optional<std::size_t> kernel;
  std::optional<std::size_t> heads;
  Activation activation = Activation::kNone;

  void Validate() const {
    Require(in_dim > 0 && out_dim > 0, ErrorCode::kConfigError, "layer dims must be positive");
    if (kind == LayerKind::kConv1d) {
      Require(kernel.has_value() && *kernel % 2 == 1, ErrorCode::kConfigError,
              "Conv1d needs an odd kernel");
    }
    if (kind == LayerKind::kCausalSelfAttention) {
      Require(heads.has_value() && *heads > 0 && out_dim % *heads == 0,
              ErrorCode::kConfigError, "attention heads must divide out_dim");
      Require(in_dim == out_dim, ErrorCode::kConfigError,
              "self-attention keeps the model dimension");
    }
  }
};

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))
inline Tensor InitUniform(Rng& rng, std::size_t rows, std::size_t cols, std::size_t fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t = Tensor::Matrix(rows, cols);
  for (double& v : t.values()) v = rng.Uniform(-bound, bound);
  return t;
}

class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet& params, const std::string& name, std::size_t in, std::size_t out,
         Activation act, Rng& rng, bool bias = true)
      : activation_(act) {
    weight_ = params.Add(name + ".weight", InitUniform(rng, in, out, in));
    if (bias) bias_ = params.Add(name + ".bias", Tensor::Matrix(1, out));
  }

  Var Forward(const Var& x) const {
    Require(x.cols() == weight_.rows(), ErrorCode::kShapeMismatch,
            "Linear: input " + x.value().ShapeString() + " for weight " +
                weight_.value().ShapeString());
    Var y = ad::MatMul(x, weight_);
    if (bias_.defined()) y = ad::AddRowBroadcast(y, bias_);
    return Activate(y, activation_);
  }

  const Var& weight() const { return weight_; }
  const Var& bias() const { return bias_; }
  Var& weight() { return weight_; }
  Var& bias() { return bias_; }

 private:
  Var weight_, bias_;
  Activation activation_ = Activation::kNone;
};

// "Same" 1-D convolution over the row (time/token) axis, zero padded.
// Weight layout: [kernel * in, out], tap k reads row i + k - kernel/2.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParameterSet& params, const std::string& name, std::size_t in, std::size_t out,
         std::size_t kernel, Activation act, Rng& rng)
      : kernel_(kernel), in_(in), activation_(act) {
    Require(kernel % 2 == 1, ErrorCode::kConfigError, "Conv1d kernel must be odd");
    weight_ = params.Add(name + ".weight", InitUniform(rng, kernel * in, out, kernel * in));
    bias_ = params.Add(name + ".bias", Tensor::Matrix(1, out));
  }

  Var Forward(const Var& x) const {
    Require(x.cols() == in_, ErrorCode::kShapeMismatch, "Conv1d: input channels");
    Var cols = ad::Unfold(x, kernel_, 1, kernel_ / 2);
    return Activate(ad::AddRowBroadcast(ad::MatMul(cols, weight_), bias_), activation_);
  }

  std::size_t kernel() const { return kernel_; }
  Var& weight() { return weight_; }
  Var& bias() { return bias_; }

 private:
  Var weight_, bias_;
  std::size_t kernel_ = 1, in_ = 1;
  Activation activation_ = Activation::kNone;
};

// Non-overlapping strided projection: every `stride` input rows become one
// output row. Used as the temporal-downsampling front-end.
class StridedProjection {
 public:
  StridedProjection() = default;
  StridedProjection(ParameterSet& params, const std::string& name, std::size_t in,
                    std::size_t out, std::size_t stride, Activation act, Rng& rng)
      : stride_(stride),
        proj_(params, name, in * stride, out, act, rng) {}

  Var Forward(const Var& x) const { return proj_.Forward(ad::Unfold(x, stride_, stride_, 0)); }
  std::size_t stride() const { return stride_; }

 private:
  std::size_t stride_ = 1;
  Linear proj_;
};

// Two-layer position-wise feed-forward block: ReLU hidden, linear output.
class Ffn {
 public:
  Ffn() = default;
  Ffn(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden,
      std::size_t out, Rng& rng)
      : hidden_(params, name + ".hidden", in, hidden, Activation::kRelu, rng),
        out_(params, name + ".out", hidden, out, Activation::kNone, rng) {}

  Var Forward(const Var& x) const { return out_.Forward(hidden_.Forward(x)); }
  Linear& hidden() { return hidden_; }
  Linear& out() { return out_; }

 private:
  Linear hidden_, out_;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterSet& params, const std::string& name, std::size_t dim) {
    gain_ = params.Add(name + ".gain", Tensor::Matrix(1, dim, 1.0));
    bias_ = params.Add(name + ".bias", Tensor::Matrix(1, dim));
  }
  Var Forward(const Var& x) const { return ad::LayerNormRows(x, gain_, bias_); }

 private:
  Var gain_, bias_;
};

// Multi-head self-attention where position i only sees positions <= i.
// Returns the output projection of the concatenated heads (no residual).
class CausalSelfAttention {
 public:
  CausalSelfAttention() = default;
  CausalSelfAttention(ParameterSet& params, const std::string& name, std::size_t dim,
                      std::size_t heads, Rng& rng)
      : dim_(dim), heads_(heads) {
    Require(heads > 0 && dim % heads == 0, ErrorCode::kConfigError,
            "attention heads must divide the model dimension");
    query_ = Linear(params, name + ".query", dim, dim, Activation::kNone, rng);
    key_ = Linear(params, name + ".key", dim, dim, Activation::kNone, rng);
    value_ = Linear(params, name + ".value", dim, dim, Activation::kNone, rng);
    output_ = Linear(params, name + ".output", dim, dim, Activation::kNone, rng);
  }

  Var Forward(const Var& x, std::vector<Tensor>* attention = nullptr) const {
    Require(x.cols() == dim_, ErrorCode::kShapeMismatch, "attention: input width");
    const std::size_t head_dim = dim_ / heads_;
    const Var q = query_.Forward(x), k = key_.Forward(x), v = value_.Forward(x);
    std::vector<Var> outputs;
    for (std::size_t h = 0; h < heads_; ++h) {
      const Var qh = ad::SliceCols(q, h * head_dim, head_dim);
      const Var kh = ad::SliceCols(k, h * head_dim, head_dim);
      const Var vh = ad::SliceCols(v, h * head_dim, head_dim);
      const Var scores = ad::Scale(ad::MatMul(qh, ad::Transpose(kh)),
                                   1.0 / std::sqrt(static_cast<double>(head_dim)));
      const Var weights = ad::SoftmaxRows(scores, /*causal=*/true);
      if (attention) attention->push_back(weights.value());
      outputs.push_back(ad::MatMul(weights, vh));
    }
    return output_.Forward(ad::ConcatCols(outputs));
  }

  Linear& value() { return value_; }
  Linear& output() { return output_; }

 private:
  std::size_t dim_ = 1, heads_ = 1;
  Linear query_, key_, value_, output_;
};

// x + Attention(LayerNorm(x)), followed by a residual feed-forward block.
class TransformerLayer {
 public:
  TransformerLayer() = default;
  TransformerLayer(ParameterSet& params, const std::string& name, std::size_t dim,
                   std::size_t heads, std::size_t ffn_hidden, Rng& rng)
      : norm_(params, name + ".norm", dim),
        attention_(params, name + ".attention", dim, heads, rng),
        ffn_(params, name + ".ffn", dim, ffn_hidden, dim, rng) {}

  Var Forward(const Var& x) const {
    const Var y = ad::Add(x, attention_.Forward(norm_.Forward(x)));
    return ad::Add(y, ffn_.Forward(y));
  }

 private:
  LayerNorm norm_;
  CausalSelfAttention attention_;
  Ffn ffn_;
};

// ---- Graph ops built on the CIF core --------------------------------------

// Train-time weight scaling a' = target * a / sum(a) with its full Jacobian.
// `weights` is a column [U, 1].
inline Var ScaleToLength(const Var& weights, double target_mass, double eps = 1e-8) {
  Require(weights.cols() == 1, ErrorCode::kShapeMismatch, "ScaleToLength: weights must be [U, 1]");
  const auto scaled = ScaleToMass(weights.value().values(), target_mass, eps);
  double total = 0;
  for (double w : weights.value().values()) total += w;
  const std::size_t n = scaled.size();
  return ad::detail::MakeOp(Tensor({n, 1}, scaled), {weights},
                            [n, total, target_mass](ad::detail::Node& self) {
                              auto& in = *self.inputs[0];
                              // d a'_u / d a_v = (T/sum) (delta_uv - a'_u / T)
                              double dot = 0;
                              for (std::size_t u = 0; u < n; ++u) dot += self.grad[u] * self.value[u];
                              for (std::size_t v = 0; v < n; ++v) {
                                in.grad[v] += (target_mass / total) *
                                              (self.grad[v] - dot / target_mass);
                              }
                            });
}

// |sum(weights) - target|, subgradient sign(sum - target) per weight.
inline Var QuantityLossOp(const Var& weights, std::size_t target_len) {
  const double loss = QuantityLoss(weights.value().values(), target_len);
  double total = 0;
  for (double w : weights.value().values()) total += w;
  const double sign = total > static_cast<double>(target_len)   ? 1.0
                      : total < static_cast<double>(target_len) ? -1.0
                                                                : 0.0;
  return ad::detail::MakeOp(Tensor::Matrix(1, 1, loss), {weights},
                            [sign](ad::detail::Node& self) {
                              auto& in = *self.inputs[0];
                              for (double& g : in.grad) g += sign * self.grad[0];
                            });
}

// Integrates frames [U, D] with a precomputed alignment into tokens [S, D].
// When `weights` ([U, 1], the integrated weights of the alignment) requires
// grad, it receives the straight-through gradient from CifBackward.
inline Var CifIntegrate(const Var& frames, const CifAlignment& alignment,
                        const Var& weights = Var()) {
  Require(frames.rows() == alignment.num_frames(), ErrorCode::kShapeMismatch,
          "CifIntegrate: frame count differs from alignment");
  const std::size_t dim = frames.cols();
  const auto tokens = Integrate(alignment, TensorRows(frames.value()));
  Tensor out = Tensor::Matrix(tokens.size(), dim);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    std::copy(tokens[i].begin(), tokens[i].end(), out.row(i).begin());
  std::vector<Var> inputs{frames};
  if (weights.defined()) inputs.push_back(weights);
  return ad::detail::MakeOp(std::move(out), inputs, [alignment, dim](ad::detail::Node& self) {
    auto& frames_node = *self.inputs[0];
    const Tensor upstream({alignment.num_tokens(), dim}, self.grad);
    const CifGradients g =
        CifBackward(alignment, TensorRows(frames_node.value), TensorRows(upstream));
    if (frames_node.requires_grad) {
      for (std::size_t u = 0; u < g.frame_grads.size(); ++u)
        for (std::size_t d = 0; d < dim; ++d) frames_node.grad[u * dim + d] += g.frame_grads[u][d];
    }
    if (self.inputs.size() > 1 && self.inputs[1]->requires_grad) {
      auto& w = *self.inputs[1];
      for (std::size_t u = 0; u < g.weight_grads.size(); ++u) w.grad[u] += g.weight_grads[u];
    }
  });
}

// ---- Losses ---------------------------------------------------------------

struct AmsConfig {
  double margin = 0.2;
  double scale = 30.0;
  std::size_t num_classes = 4;

  void Validate() const {
    Require(margin >= 0 && margin < 1, ErrorCode::kConfigError, "AMSoftmax margin must be in [0, 1)");
    Require(scale > 0, ErrorCode::kConfigError, "AMSoftmax scale must be positive");
    Require(num_classes > 0, ErrorCode::kConfigError, "AMSoftmax needs classes");
  }
};

// Cosine logits s * cos(e_i, w_c) between L2-normalized rows.
inline Var CosineLogits(const Var& embeddings, const Var& class_weights, double scale) {
  Require(embeddings.cols() == class_weights.cols(), ErrorCode::kShapeMismatch,
          "cosine logits: embedding width differs from class weight width");
  return ad::Scale(ad::MatMul(ad::L2NormalizeRows(embeddings),
                              ad::Transpose(ad::L2NormalizeRows(class_weights))),
                   scale);
}

// Additive-margin softmax: mean over rows of cross-entropy on
// s * (cos(theta) - m * [c == label]).
inline Var AmSoftmaxLoss(const Var& embeddings, const std::vector<std::size_t>& labels,
                         const Var& class_weights, const AmsConfig& config) {
  config.Validate();
  Require(class_weights.rows() == config.num_classes, ErrorCode::kShapeMismatch,
          "AMSoftmax: class weight rows differ from num_classes");
  Require(labels.size() == embeddings.rows(), ErrorCode::kShapeMismatch,
          "AMSoftmax: label count");
  Tensor margin = Tensor::Matrix(labels.size(), config.num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Require(labels[i] < config.num_classes, ErrorCode::kInvalidLabel,
            "label " + std::to_string(labels[i]) + " >= class count");
    margin.at(i, labels[i]) = config.margin * config.scale;
  }
  const Var logits = ad::Sub(CosineLogits(embeddings, class_weights, config.scale),
                             ad::Constant(std::move(margin)));
  return ad::CrossEntropyRows(logits, labels);
}

struct LossWithGrads {
  double loss = 0;
  Tensor grad_embeddings;
  Tensor grad_weights;
};

// Standalone evaluation returning the loss and both gradients.
inline LossWithGrads AmSoftmaxLossWithGrads(const Tensor& embeddings,
                                            const std::vector<std::size_t>& labels,
                                            const Tensor& class_weights,
                                            const AmsConfig& config) {
  Var e = Var::Leaf(embeddings), w = Var::Leaf(class_weights);
  Var loss = AmSoftmaxLoss(e, labels, w, config);
  ad::Backward(loss);
  return {loss.scalar(), Tensor(embeddings.shape(), e.grad()),
          Tensor(class_weights.shape(), w.grad())};
}

struct BceResult {
  double loss = 0;
  std::vector<double> grad_scores;
};

inline BceResult BceLossWithGrads(const std::vector<double>& scores, const std::vector<int>& targets) {
  Var p = Var::Leaf(Tensor({scores.size(), 1}, scores));
  Var loss = ad::BinaryCrossEntropy(p, targets);
  ad::Backward(loss);
  return {loss.scalar(), p.grad()};
}

}  // namespace cifscd::nn
