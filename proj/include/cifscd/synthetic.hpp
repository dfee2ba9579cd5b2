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

// Synthetic multi-speaker sentences with exactly known token and speaker
// boundaries, and the on-disk dataset container.
//
// Each token lasts a whole number of downsampled frames. A raw frame is
//   speaker_mean[speaker] + content_pattern[content] + noise,
// and the token's final downsampled frame also carries a shared marker.
// Speaker turns have geometric lengths in tokens.
//
// Dataset directory:
//   dataset.json           {format_version, num_sentences, speakers, generator}
//   sentence_NNNNN.json    {format_version, id, frame_shift_s, downsampling,
//                           frames: [[F doubles] x T], token_speakers,
//                           token_contents, token_end_frames,
//                           reference: [{start, end, speaker}]}

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cifscd/errors.hpp"
#include "cifscd/metrics.hpp"
#include "cifscd/nn.hpp"
#include "cifscd/tensor.hpp"
#include "json.hpp"

namespace cifscd::corpus {

inline constexpr int kDatasetFormatVersion = 1;

struct SyntheticConfig {
  std::uint64_t seed = 1;
  std::size_t num_sentences = 200;
  std::size_t num_speakers = 4;
  std::size_t vocab_size = 8;
  std::size_t feature_dim = 8;
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 30;
  // Token duration range in downsampled frames.
  std::size_t min_token_frames = 3;
  std::size_t max_token_frames = 5;
  std::size_t downsampling = 4;
  double frame_shift_s = 0.01;
  // Probability that the next token keeps the current speaker.
  double turn_continue_prob = 0.8;
  double speaker_scale = 1.5;
  double content_scale = 1.0;
  double marker_scale = 1.0;
  double noise_stddev = 0.3;

  void Validate() const {
    Require(num_speakers >= 1 && vocab_size >= 2 && feature_dim >= 1, ErrorCode::kConfigError,
            "synthetic: need speakers, a vocabulary of at least 2 and features");
    Require(min_tokens >= 1 && min_tokens <= max_tokens, ErrorCode::kConfigError,
            "synthetic: bad token count range");
    Require(min_token_frames >= 1 && min_token_frames <= max_token_frames,
            ErrorCode::kConfigError, "synthetic: bad token duration range");
    Require(downsampling >= 1 && frame_shift_s > 0, ErrorCode::kConfigError,
            "synthetic: bad frame geometry");
    Require(turn_continue_prob >= 0 && turn_continue_prob < 1, ErrorCode::kConfigError,
            "synthetic: turn_continue_prob must be in [0, 1)");
    Require(noise_stddev >= 0, ErrorCode::kConfigError, "synthetic: negative noise");
  }
};

inline nlohmann::json ToJson(const SyntheticConfig& c) {
  return {{"seed", c.seed},
          {"num_sentences", c.num_sentences},
          {"num_speakers", c.num_speakers},
          {"vocab_size", c.vocab_size},
          {"feature_dim", c.feature_dim},
          {"min_tokens", c.min_tokens},
          {"max_tokens", c.max_tokens},
          {"min_token_frames", c.min_token_frames},
          {"max_token_frames", c.max_token_frames},
          {"downsampling", c.downsampling},
          {"frame_shift_s", c.frame_shift_s},
          {"turn_continue_prob", c.turn_continue_prob},
          {"speaker_scale", c.speaker_scale},
          {"content_scale", c.content_scale},
          {"marker_scale", c.marker_scale},
          {"noise_stddev", c.noise_stddev}};
}

struct SyntheticSentence {
  std::string id;
  Tensor frames;  // [T, F]
  double frame_shift_s = 0.01;
  std::size_t downsampling = 4;
  std::vector<std::size_t> token_speakers;
  std::vector<std::size_t> token_contents;
  // Exclusive raw-frame end of each token.
  std::vector<std::size_t> token_end_frames;
  metrics::Segmentation reference;

  std::size_t token_count() const { return token_speakers.size(); }
  double duration_s() const { return static_cast<double>(frames.rows()) * frame_shift_s; }
};

inline std::string SpeakerName(std::size_t k) { return "spk" + std::to_string(k); }

// Reference segmentation: maximal runs of same-speaker tokens.
inline metrics::Segmentation ReferenceFromTokens(const std::vector<std::size_t>& speakers,
                                                 const std::vector<std::size_t>& end_frames,
                                                 double frame_shift_s) {
  std::vector<metrics::Segment> segs;
  std::size_t start = 0;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (i + 1 == speakers.size() || speakers[i + 1] != speakers[i]) {
      segs.push_back({static_cast<double>(start) * frame_shift_s,
                      static_cast<double>(end_frames[i]) * frame_shift_s, SpeakerName(speakers[i])});
      start = end_frames[i];
    }
  }
  return metrics::Segmentation(std::move(segs));
}

inline std::vector<SyntheticSentence> GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  nn::Rng rng(config.seed);
  const std::size_t F = config.feature_dim;
  auto random_vectors = [&](std::size_t n, double scale) {
    std::vector<std::vector<double>> out(n, std::vector<double>(F));
    for (auto& v : out)
      for (double& x : v) x = rng.Normal(0.0, scale);
    return out;
  };
  const auto speaker_means = random_vectors(config.num_speakers, config.speaker_scale);
  const auto patterns = random_vectors(config.vocab_size, config.content_scale);
  const auto marker = random_vectors(1, config.marker_scale).front();

  std::vector<SyntheticSentence> out;
  for (std::size_t n = 0; n < config.num_sentences; ++n) {
    SyntheticSentence s;
    char id[32];
    std::snprintf(id, sizeof(id), "sentence_%05zu", n);
    s.id = id;
    s.frame_shift_s = config.frame_shift_s;
    s.downsampling = config.downsampling;
    const std::size_t tokens =
        config.min_tokens + rng.Index(config.max_tokens - config.min_tokens + 1);
    std::size_t speaker = rng.Index(config.num_speakers), content = config.vocab_size;
    std::vector<std::size_t> lengths;
    std::size_t total = 0;
    for (std::size_t i = 0; i < tokens; ++i) {
      if (i > 0 && config.num_speakers > 1 && !rng.Bernoulli(config.turn_continue_prob)) {
        speaker = (speaker + 1 + rng.Index(config.num_speakers - 1)) % config.num_speakers;
      }
      // Consecutive tokens never share content, so every boundary is visible.
      std::size_t next = rng.Index(config.vocab_size - (i > 0 ? 1 : 0));
      if (i > 0 && next >= content) ++next;
      content = next;
      const std::size_t len =
          config.min_token_frames + rng.Index(config.max_token_frames - config.min_token_frames + 1);
      total += len * config.downsampling;
      s.token_speakers.push_back(speaker);
      s.token_contents.push_back(content);
      s.token_end_frames.push_back(total);
      lengths.push_back(len);
    }
    s.frames = Tensor::Matrix(total, F);
    std::size_t t = 0;
    for (std::size_t i = 0; i < tokens; ++i) {
      const std::size_t raw = lengths[i] * config.downsampling;
      for (std::size_t k = 0; k < raw; ++k, ++t) {
        const bool last = k + config.downsampling >= raw;
        for (std::size_t f = 0; f < F; ++f) {
          const double content = patterns[s.token_contents[i]][f] + (last ? marker[f] : 0.0);
          s.frames.at(t, f) = speaker_means[s.token_speakers[i]][f] + content +
                              rng.Normal(0.0, config.noise_stddev);
        }
      }
    }
    s.reference = ReferenceFromTokens(s.token_speakers, s.token_end_frames, s.frame_shift_s);
    out.push_back(std::move(s));
  }
  return out;
}

inline nlohmann::json ToJson(const SyntheticSentence& s) {
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t t = 0; t < s.frames.rows(); ++t) {
    frames.push_back(std::vector<double>(s.frames.row(t).begin(), s.frames.row(t).end()));
  }
  nlohmann::json reference = nlohmann::json::array();
  for (const auto& seg : s.reference.segments()) {
    reference.push_back({{"start", seg.start}, {"end", seg.end}, {"speaker", seg.label}});
  }
  return {{"format_version", kDatasetFormatVersion},
          {"id", s.id},
          {"frame_shift_s", s.frame_shift_s},
          {"downsampling", s.downsampling},
          {"frames", frames},
          {"token_speakers", s.token_speakers},
          {"token_contents", s.token_contents},
          {"token_end_frames", s.token_end_frames},
          {"reference", reference}};
}

inline SyntheticSentence SentenceFromJson(const nlohmann::json& j) {
  try {
    Require(j.at("format_version").get<int>() == kDatasetFormatVersion, ErrorCode::kParseError,
            "unsupported dataset format_version");
    SyntheticSentence s;
    s.id = j.at("id").get<std::string>();
    s.frame_shift_s = j.at("frame_shift_s").get<double>();
    s.downsampling = j.at("downsampling").get<std::size_t>();
    const auto rows = j.at("frames").get<std::vector<std::vector<double>>>();
    s.frames = Tensor::FromRows(rows);
    s.token_speakers = j.at("token_speakers").get<std::vector<std::size_t>>();
    s.token_contents = j.at("token_contents").get<std::vector<std::size_t>>();
    s.token_end_frames = j.at("token_end_frames").get<std::vector<std::size_t>>();
    Require(s.token_speakers.size() == s.token_contents.size() &&
                s.token_speakers.size() == s.token_end_frames.size() && !s.token_speakers.empty(),
            ErrorCode::kParseError, "token label arrays differ in length");
    std::vector<metrics::Segment> segs;
    for (const auto& r : j.at("reference")) {
      segs.push_back({r.at("start").get<double>(), r.at("end").get<double>(),
                      r.at("speaker").get<std::string>()});
    }
    s.reference = metrics::Segmentation(std::move(segs));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("dataset sentence: ") + e.what());
  }
}

inline void WriteDataset(const std::filesystem::path& dir,
                         const std::vector<SyntheticSentence>& sentences,
                         const nlohmann::json& generator = nlohmann::json::object()) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream out(p);
    Require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + p.string());
    out << j.dump() << "\n";
  };
  std::vector<std::string> speakers;
  for (const auto& s : sentences)
    for (const auto& seg : s.reference.segments())
      if (std::find(speakers.begin(), speakers.end(), seg.label) == speakers.end())
        speakers.push_back(seg.label);
  std::sort(speakers.begin(), speakers.end());
  write(dir / "dataset.json", {{"format_version", kDatasetFormatVersion},
                               {"num_sentences", sentences.size()},
                               {"speakers", speakers},
                               {"generator", generator}});
  for (const auto& s : sentences) write(dir / (s.id + ".json"), ToJson(s));
}

inline std::vector<SyntheticSentence> ReadDataset(const std::filesystem::path& dir) {
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    Require(static_cast<bool>(in), ErrorCode::kIoError, "cannot read " + p.string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, p.string() + ": " + e.what());
    }
  };
  const auto index = read(dir / "dataset.json");
  Require(index.value("format_version", 0) == kDatasetFormatVersion, ErrorCode::kParseError,
          "unsupported dataset format_version");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("sentence_", 0) == 0 && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Require(files.size() == index.at("num_sentences").get<std::size_t>(), ErrorCode::kParseError,
          "dataset index does not match sentence files");
  std::vector<SyntheticSentence> out;
  for (const auto& f : files) out.push_back(SentenceFromJson(read(f)));
  return out;
}

}  // namespace cifscd::corpus
