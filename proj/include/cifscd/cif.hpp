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

// Continuous integrate-and-fire (CIF).
//
// CIF turns a frame sequence h_1..h_U with non-negative information weights
// a_1..a_U into a shorter token sequence. Weights are accumulated left to
// right; every time the running total reaches the threshold the frame that
// crossed it is split, the part that completes the current integration goes
// to the token being fired, and the remainder starts the next token.
//
// Firing depends only on the weights. The alignment (which frames feed which
// token, with what coefficient) is therefore computed once by ComputeAlignment
// and can be applied to any number of frame sequences sharing those weights;
// this is how speaker frames are converted to token level with the weights
// produced on the recognition side.
//
// All accumulation is done in double precision regardless of the frame
// scalar type.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cifscd/errors.hpp"

namespace cifscd {

enum class CifMode { kTrain, kInference };
enum class TailPolicy { kFireIfAtLeastHalf, kDrop };

struct CifConfig {
  double threshold = 1.0;
  CifMode mode = CifMode::kInference;
  TailPolicy tail_policy = TailPolicy::kFireIfAtLeastHalf;
  double scale_epsilon = 1e-8;

  void Validate() const {
    Require(std::isfinite(threshold) && threshold > 0, ErrorCode::kConfigError,
            "CIF threshold must be positive");
    Require(std::isfinite(scale_epsilon) && scale_epsilon >= 0,
            ErrorCode::kConfigError, "scale_epsilon must be non-negative");
  }
};

// Accumulated weight within this distance below the threshold still fires.
// Absorbs rounding in the running sum (e.g. scaled weights summing to
// 3.9999999999999996 must still yield four tokens).
inline constexpr double kFireTolerance = 1e-10;

struct Contribution {
  std::size_t frame;
  double coeff;
};

struct CifAlignment {
  // Weights that were integrated: the scaled weights in train mode, the raw
  // weights otherwise.
  std::vector<double> integrated_weights;
  // Fired time step (0-based, inclusive end) of each token.
  std::vector<std::size_t> boundaries;
  std::vector<std::vector<Contribution>> contributions;
  bool tail_fired = false;
  double discarded_residue = 0.0;
  // Per frame u, the token whose unit interval holds the lower (upper) end
  // of [C(u-1), C(u)] on the cumulative weight axis. Values >= num_tokens()
  // mean the end falls in a token that never fired.
  std::vector<std::size_t> lower_token;
  std::vector<std::size_t> upper_token;

  std::size_t num_tokens() const { return boundaries.size(); }
  std::size_t num_frames() const { return integrated_weights.size(); }
};

template <class T>
struct FiredTokens {
  std::vector<std::vector<T>> tokens;
  std::vector<std::size_t> boundaries;
  std::vector<std::vector<Contribution>> contributions;
};

template <class T>
struct WeightedFrames {
  std::vector<std::vector<T>> frames;
  std::vector<double> weights;

  void Validate() const {
    Require(!frames.empty(), ErrorCode::kEmptyInput, "no frames");
    Require(frames.size() == weights.size(), ErrorCode::kShapeMismatch,
            "frame count differs from weight count");
    const std::size_t dim = frames.front().size();
    for (const auto& f : frames) {
      Require(f.size() == dim, ErrorCode::kShapeMismatch,
              "frames differ in dimension");
    }
  }
};

// Anything indexable as frames[u][d] with sizes, e.g. vector<vector<float>>
// or TensorRows.
template <class S>
concept FrameSequence = requires(const S& s, std::size_t i) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s[i].size() } -> std::convertible_to<std::size_t>;
  { static_cast<double>(s[i][i]) };
};

inline void CheckWeights(std::span<const double> weights) {
  for (double w : weights) {
    Require(std::isfinite(w), ErrorCode::kNonFiniteWeight,
            "weight is NaN or infinite");
    Require(w >= 0, ErrorCode::kInvalidArgument, "weight is negative");
  }
}

// Rescales weights so they sum to `target_mass`, keeping proportions.
inline std::vector<double> ScaleToMass(std::span<const double> weights,
                                       double target_mass, double eps) {
  CheckWeights(weights);
  double total = 0.0;
  for (double w : weights) total += w;
  Require(total > eps, ErrorCode::kZeroWeightMass,
          "weight sum " + std::to_string(total) + " is not above epsilon");
  const double factor = target_mass / total;
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] * factor;
  return out;
}

// Training-time scaling: the returned weights sum to target_len.
inline std::vector<double> ScaleWeights(std::span<const double> weights,
                                        std::size_t target_len,
                                        double eps = 1e-8) {
  Require(target_len >= 1, ErrorCode::kInvalidArgument,
          "target length must be positive");
  return ScaleToMass(weights, static_cast<double>(target_len), eps);
}

// |sum(raw) - target_len|, computed on the unscaled estimator output.
inline double QuantityLoss(std::span<const double> raw_weights,
                           std::size_t target_len) {
  double total = 0.0;
  for (double w : raw_weights) {
    Require(std::isfinite(w), ErrorCode::kNonFiniteWeight,
            "weight is NaN or infinite");
    total += w;
  }
  return std::abs(total - static_cast<double>(target_len));
}

// Runs the integrate-and-fire recurrence over the weights alone.
//
// Train mode requires target_len and first scales the weights to
// target_len * threshold, so exactly target_len tokens fire. Inference mode
// integrates the raw weights; the leftover after the last frame fires one
// extra token when it reaches half the threshold and the tail policy allows.
inline CifAlignment ComputeAlignment(std::span<const double> weights,
                                     const CifConfig& config,
                                     std::optional<std::size_t> target_len) {
  config.Validate();
  Require(!weights.empty(), ErrorCode::kEmptyInput, "no frames");
  CheckWeights(weights);

  CifAlignment out;
  if (config.mode == CifMode::kTrain) {
    Require(target_len.has_value() && *target_len >= 1,
            ErrorCode::kInvalidArgument,
            "train-mode CIF needs a positive target length");
    out.integrated_weights = ScaleToMass(
        weights, static_cast<double>(*target_len) * config.threshold,
        config.scale_epsilon);
  } else {
    out.integrated_weights.assign(weights.begin(), weights.end());
  }

  const double beta = config.threshold;
  const double fire_at = beta - kFireTolerance * beta;
  double accumulated = 0.0;
  std::vector<Contribution> current;

  const std::size_t num_frames = out.integrated_weights.size();
  out.lower_token.resize(num_frames);
  out.upper_token.resize(num_frames);
  for (std::size_t u = 0; u < num_frames; ++u) {
    double remaining = out.integrated_weights[u];
    out.lower_token[u] = out.boundaries.size();
    bool ends_in_fired = false;
    // One frame may complete several integrations when its weight is large.
    while (accumulated + remaining >= fire_at) {
      const double completing = std::min(beta - accumulated, remaining);
      if (completing > 0) current.push_back({u, completing});
      // The frame ends inside this token unless a leftover beyond the
      // fire tolerance spills into the next one.
      ends_in_fired = remaining - completing <= kFireTolerance * beta;
      if (ends_in_fired) out.upper_token[u] = out.boundaries.size();
      out.boundaries.push_back(u);
      out.contributions.push_back(std::move(current));
      current.clear();
      remaining -= completing;
      accumulated = 0.0;
      if (ends_in_fired) break;
    }
    if (!ends_in_fired) out.upper_token[u] = out.boundaries.size();
    if (remaining > 0) {
      current.push_back({u, remaining});
      accumulated += remaining;
    }
  }

  const bool fire_tail = config.mode == CifMode::kInference &&
                         config.tail_policy == TailPolicy::kFireIfAtLeastHalf &&
                         accumulated >= 0.5 * beta;
  if (fire_tail) {
    out.boundaries.push_back(out.integrated_weights.size() - 1);
    out.contributions.push_back(std::move(current));
    out.tail_fired = true;
  } else {
    out.discarded_residue = accumulated;
  }
  return out;
}

// Applies an alignment to a frame sequence: token i is the
// coefficient-weighted sum of its contributing frames.
template <FrameSequence Frames>
std::vector<std::vector<double>> Integrate(const CifAlignment& alignment,
                                           const Frames& frames) {
  Require(frames.size() == alignment.num_frames(), ErrorCode::kShapeMismatch,
          "frame count differs from alignment");
  const std::size_t dim = frames.size() ? frames[0].size() : 0;
  std::vector<std::vector<double>> tokens(alignment.num_tokens(),
                                          std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const Contribution& c : alignment.contributions[i]) {
      const auto& frame = frames[c.frame];
      Require(frame.size() == dim, ErrorCode::kShapeMismatch,
              "frames differ in dimension");
      for (std::size_t d = 0; d < dim; ++d) {
        tokens[i][d] += c.coeff * static_cast<double>(frame[d]);
      }
    }
  }
  return tokens;
}

template <class T>
FiredTokens<T> CifForward(const WeightedFrames<T>& input,
                          const CifConfig& config,
                          std::optional<std::size_t> target_len = std::nullopt) {
  input.Validate();
  CifAlignment alignment = ComputeAlignment(input.weights, config, target_len);
  auto integrated = Integrate(alignment, input.frames);

  FiredTokens<T> out;
  out.tokens.reserve(integrated.size());
  for (auto& token : integrated) {
    out.tokens.emplace_back(token.begin(), token.end());
  }
  out.boundaries = std::move(alignment.boundaries);
  out.contributions = std::move(alignment.contributions);
  return out;
}

struct CifGradients {
  std::vector<std::vector<double>> frame_grads;
  // With respect to the integrated (scaled in train mode) weights.
  std::vector<double> weight_grads;
};

// Gradient of the firing computation with the firing pattern held fixed
// (which frame fires which token).
//
// Frame gradients are exact: token i is linear in the frames. For weights,
// frame u covers [C(u-1), C(u)] on the cumulative axis, C(u) = a_0 + ... +
// a_u, and token i collects the part inside [i * beta, (i + 1) * beta].
// Moving C(u) trades weight between frames u and u + 1 inside the token
// holding that point, so
//   dL/dC(u) = <g[upper(u)], h_u> - <g[lower(u + 1)], h_(u+1)>
//   dL/da_v  = sum over u >= v of dL/dC(u).
template <FrameSequence Frames, FrameSequence Grads>
CifGradients CifBackward(const CifAlignment& alignment, const Frames& frames,
                         const Grads& upstream) {
  Require(upstream.size() == alignment.num_tokens(), ErrorCode::kShapeMismatch,
          "upstream gradient count differs from fired token count");
  Require(frames.size() == alignment.num_frames(), ErrorCode::kShapeMismatch,
          "frame count differs from alignment");
  const std::size_t num_frames = frames.size();
  const std::size_t dim = num_frames ? frames[0].size() : 0;
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    Require(upstream[i].size() == dim, ErrorCode::kShapeMismatch,
            "upstream gradient dimension differs from frame dimension");
  }

  CifGradients out;
  out.frame_grads.assign(num_frames, std::vector<double>(dim, 0.0));
  out.weight_grads.assign(num_frames, 0.0);

  // <h_u, g_i>, zero for tokens that never fired.
  auto dot = [&](std::size_t u, std::size_t i) {
    if (i >= upstream.size()) return 0.0;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      s += static_cast<double>(frames[u][d]) * static_cast<double>(upstream[i][d]);
    }
    return s;
  };

  for (std::size_t i = 0; i < alignment.num_tokens(); ++i) {
    for (const Contribution& c : alignment.contributions[i]) {
      for (std::size_t d = 0; d < dim; ++d) {
        out.frame_grads[c.frame][d] += c.coeff * static_cast<double>(upstream[i][d]);
      }
    }
  }
  double suffix = 0.0;
  for (std::size_t u = num_frames; u-- > 0;) {
    suffix += dot(u, alignment.upper_token[u]);
    if (u + 1 < num_frames) suffix -= dot(u + 1, alignment.lower_token[u + 1]);
    out.weight_grads[u] = suffix;
  }
  return out;
}

template <class T>
CifGradients CifBackward(const WeightedFrames<T>& input, const CifConfig& config,
                         const std::vector<std::vector<double>>& upstream,
                         std::optional<std::size_t> target_len = std::nullopt) {
  input.Validate();
  const CifAlignment alignment =
      ComputeAlignment(input.weights, config, target_len);
  return CifBackward(alignment, input.frames, upstream);
}

}  // namespace cifscd
