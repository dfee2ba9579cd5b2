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

// Checkpoint container: named double arrays behind a JSON header.
//
//   bytes 0..7   magic "CIFSCDCK"
//   bytes 8..15  header length N, uint64 little-endian
//   next N bytes JSON header: format_version, seed, config_hash, config,
//                tensors: [{name, shape, offset}] (offset counted in doubles)
//   remainder    IEEE-754 doubles, little-endian, in header order

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "cifscd/errors.hpp"
#include "cifscd/nn.hpp"
#include "cifscd/tensor.hpp"
#include "json.hpp"

namespace cifscd::checkpoint {

inline constexpr char kMagic[8] = {'C', 'I', 'F', 'S', 'C', 'D', 'C', 'K'};
inline constexpr int kFormatVersion = 1;

// FNV-1a over the compact JSON dump, as 16 hex digits.
inline std::string ConfigHash(const nlohmann::json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Checkpoint {
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* Find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
      if (n == name) return &t;
    return nullptr;
  }
};

inline Checkpoint Capture(const nn::ParameterSet& params, std::uint64_t seed,
                          const nlohmann::json& config) {
  Checkpoint ck{seed, config, {}};
  for (const auto& [name, v] : params.entries()) ck.tensors.emplace_back(name, v.value());
  return ck;
}

namespace detail {

inline void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t GetU64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string Serialize(const Checkpoint& ck) {
  nlohmann::json entries = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : ck.tensors) {
    entries.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}});
    offset += t.size();
  }
  const nlohmann::json header = {{"format_version", kFormatVersion},
                                 {"seed", ck.seed},
                                 {"config_hash", ConfigHash(ck.config)},
                                 {"config", ck.config},
                                 {"tensors", entries}};
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  detail::PutU64(out, text.size());
  out += text;
  for (const auto& [_, t] : ck.tensors)
    for (double v : t.values()) detail::PutU64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline Checkpoint Deserialize(const std::string& bytes) {
  Require(bytes.size() >= 16 && bytes.compare(0, 8, kMagic, 8) == 0, ErrorCode::kParseError,
          "not a checkpoint");
  const std::uint64_t header_len = detail::GetU64(bytes, 8);
  Require(header_len <= bytes.size() - 16, ErrorCode::kParseError, "truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("checkpoint header: ") + e.what());
  }
  Require(header.value("format_version", 0) == kFormatVersion, ErrorCode::kParseError,
          "unsupported checkpoint version");
  Checkpoint ck;
  ck.seed = header.at("seed").get<std::uint64_t>();
  ck.config = header.at("config");
  Require(header.at("config_hash").get<std::string>() == ConfigHash(ck.config),
          ErrorCode::kParseError, "checkpoint config hash mismatch");
  const std::size_t data = 16 + header_len;
  for (const auto& entry : header.at("tensors")) {
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    const auto offset = entry.at("offset").get<std::size_t>();
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    Require(data + 8 * (offset + n) <= bytes.size(), ErrorCode::kParseError,
            "truncated checkpoint data");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
      values[i] = std::bit_cast<double>(detail::GetU64(bytes, data + 8 * (offset + i)));
    ck.tensors.emplace_back(entry.at("name").get<std::string>(), Tensor(shape, std::move(values)));
  }
  return ck;
}

inline void Save(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  Require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + path);
  const std::string bytes = Serialize(ck);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIoError, "write failed: " + path);
}

inline Checkpoint Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIoError, "cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Deserialize(bytes);
}

// Copies every parameter of `params` from the checkpoint. Names and shapes
// must match; checkpoint entries without a parameter are ignored unless
// `strict`.
inline void Restore(nn::ParameterSet& params, const Checkpoint& ck, bool strict = false) {
  for (auto& [name, v] : params.entries()) {
    const Tensor* t = ck.Find(name);
    Require(t != nullptr, ErrorCode::kShapeMismatch, "checkpoint lacks " + name);
    Require(t->shape() == v.value().shape(), ErrorCode::kShapeMismatch,
            "checkpoint shape mismatch for " + name);
    v.mutable_value() = *t;
  }
  if (strict) {
    Require(ck.tensors.size() == params.entries().size(), ErrorCode::kShapeMismatch,
            "checkpoint has parameters the model does not");
  }
}

}  // namespace cifscd::checkpoint
