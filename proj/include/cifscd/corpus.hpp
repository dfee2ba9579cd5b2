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

// Annotation ingestion, sentence construction with overlap/silence
// exclusion, and token-level label derivation.
//
// Annotation lines:
//   SPEAKER <session> <start_s> <end_s> <speaker_id> [text...]
// Blank lines and lines starting with '#' are skipped.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cifscd/errors.hpp"
#include "cifscd/metrics.hpp"
#include "json.hpp"

namespace cifscd::corpus {

struct AnnotationInterval {
  std::string session_id;
  std::string speaker_id;
  double start_s = 0;
  double end_s = 0;
  std::string text;

  double duration() const { return end_s - start_s; }
  bool operator==(const AnnotationInterval&) const = default;
};

namespace detail {

inline std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Next whitespace-delimited field; advances `rest`.
inline std::string_view NextField(std::string_view& rest) {
  rest = rest.substr(std::min(rest.size(), rest.find_first_not_of(" \t")));
  const auto end = std::min(rest.size(), rest.find_first_of(" \t"));
  const std::string_view field = rest.substr(0, end);
  rest = rest.substr(end);
  return field;
}

inline double ParseSeconds(std::string_view field, std::size_t line) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError(line, "bad time value '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

// Shortest round-trip decimal, padded to at least three decimals.
inline std::string FormatSeconds(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  std::string s(buf, ptr);
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    s += '.';
    dot = s.size() - 1;
  }
  while (s.size() - dot - 1 < 3) s += '0';
  return s;
}

inline std::vector<AnnotationInterval> ParseAnnotations(std::istream& in) {
  std::vector<AnnotationInterval> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view rest = detail::Trim(raw);
    if (rest.empty() || rest.front() == '#') continue;
    if (detail::NextField(rest) != "SPEAKER") throw ParseError(line, "expected SPEAKER record");
    AnnotationInterval a;
    a.session_id = std::string(detail::NextField(rest));
    const std::string_view start = detail::NextField(rest);
    const std::string_view end = detail::NextField(rest);
    a.speaker_id = std::string(detail::NextField(rest));
    if (a.session_id.empty() || start.empty() || end.empty() || a.speaker_id.empty()) {
      throw ParseError(line, "expected: SPEAKER <session> <start> <end> <speaker> [text]");
    }
    a.start_s = detail::ParseSeconds(start, line);
    a.end_s = detail::ParseSeconds(end, line);
    if (!(a.end_s > a.start_s)) throw ParseError(line, "end time must exceed start time");
    a.text = std::string(detail::Trim(rest));
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.session_id, x.start_s, x.end_s) < std::tie(y.session_id, y.start_s, y.end_s);
  });
  return out;
}

inline std::vector<AnnotationInterval> ParseAnnotations(const std::string& text) {
  std::istringstream in(text);
  return ParseAnnotations(in);
}

inline std::string SerializeAnnotations(const std::vector<AnnotationInterval>& intervals) {
  std::string out;
  for (const auto& a : intervals) {
    out += "SPEAKER " + a.session_id + " " + FormatSeconds(a.start_s) + " " +
           FormatSeconds(a.end_s) + " " + a.speaker_id;
    if (!a.text.empty()) out += " " + a.text;
    out += "\n";
  }
  return out;
}

// ---- Sentence construction ------------------------------------------------

enum class RejectReason { kOverlapDuration, kOverlapRatio, kLongSilence, kNoChangeTestFilter };

inline std::string_view RejectReasonName(RejectReason r) {
  switch (r) {
    case RejectReason::kOverlapDuration: return "OverlapDuration";
    case RejectReason::kOverlapRatio: return "OverlapRatio";
    case RejectReason::kLongSilence: return "LongSilence";
    case RejectReason::kNoChangeTestFilter: return "NoChangeTestFilter";
  }
  return "Unknown";
}

struct SentencePolicy {
  std::size_t max_members = 4;
  // A gap longer than this between consecutive intervals starts a new
  // sentence. Independent of the rejection thresholds below.
  double group_gap_s = 10.0;
  double max_overlap_s = 1.0;
  double max_overlap_ratio = 0.10;
  double max_silence_s = 10.0;
  bool test_set = false;
};

struct Sentence {
  std::vector<AnnotationInterval> intervals;
  double start_s = 0;
  double end_s = 0;
  bool kept = true;
  std::optional<RejectReason> reject_reason;
  double overlap_s = 0;
  double silence_s = 0;
};

namespace detail {

struct Range {
  double lo, hi;
};

inline std::vector<Range> Union(std::vector<Range> ranges) {
  std::sort(ranges.begin(), ranges.end(), [](auto a, auto b) { return a.lo < b.lo; });
  std::vector<Range> out;
  for (const Range& r : ranges) {
    if (r.hi <= r.lo) continue;
    if (!out.empty() && r.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, r.hi);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

inline double Measure(const std::vector<Range>& disjoint) {
  double m = 0;
  for (const Range& r : disjoint) m += r.hi - r.lo;
  return m;
}

// Parts of `target` covered by any of `others`.
inline std::vector<Range> CoveredParts(Range target, const std::vector<Range>& others) {
  std::vector<Range> parts;
  for (const Range& o : others) {
    const double lo = std::max(target.lo, o.lo), hi = std::min(target.hi, o.hi);
    if (hi > lo) parts.push_back({lo, hi});
  }
  return Union(std::move(parts));
}

inline void Evaluate(Sentence& s, const std::vector<AnnotationInterval>& session,
                     const std::vector<std::size_t>& member_ids, const SentencePolicy& policy) {
  std::vector<Range> overlapped;
  std::optional<RejectReason> ratio_violation;
  for (std::size_t id : member_ids) {
    const AnnotationInterval& m = session[id];
    std::vector<Range> others;
    for (std::size_t j = 0; j < session.size(); ++j) {
      if (j != id) others.push_back({session[j].start_s, session[j].end_s});
    }
    const auto covered = CoveredParts({m.start_s, m.end_s}, others);
    if (Measure(covered) > policy.max_overlap_ratio * m.duration()) {
      ratio_violation = RejectReason::kOverlapRatio;
    }
    overlapped.insert(overlapped.end(), covered.begin(), covered.end());
  }
  s.overlap_s = Measure(Union(std::move(overlapped)));

  std::vector<Range> speech;
  for (const auto& m : s.intervals) speech.push_back({m.start_s, m.end_s});
  s.silence_s = (s.end_s - s.start_s) - Measure(Union(std::move(speech)));

  bool has_change = false;
  for (const auto& m : s.intervals) has_change |= m.speaker_id != s.intervals.front().speaker_id;

  if (s.overlap_s > policy.max_overlap_s) {
    s.reject_reason = RejectReason::kOverlapDuration;
  } else if (ratio_violation) {
    s.reject_reason = ratio_violation;
  } else if (s.silence_s > policy.max_silence_s) {
    s.reject_reason = RejectReason::kLongSilence;
  } else if (policy.test_set && !has_change) {
    s.reject_reason = RejectReason::kNoChangeTestFilter;
  }
  s.kept = !s.reject_reason.has_value();
}

}  // namespace detail

// Groups each session's intervals greedily into sentences of up to
// max_members consecutive intervals, then applies the exclusion rules.
// Overlap is measured against every interval of the session.
inline std::vector<Sentence> BuildSentences(const std::vector<AnnotationInterval>& intervals,
                                            const SentencePolicy& policy) {
  Require(policy.max_members >= 1, ErrorCode::kConfigError, "max_members must be positive");
  std::map<std::string, std::vector<AnnotationInterval>> sessions;
  for (const auto& a : intervals) sessions[a.session_id].push_back(a);

  std::vector<Sentence> out;
  for (auto& [_, session] : sessions) {
    std::stable_sort(session.begin(), session.end(),
                     [](const auto& x, const auto& y) { return x.start_s < y.start_s; });
    std::vector<std::size_t> group;
    double group_end = 0;
    auto flush = [&] {
      if (group.empty()) return;
      Sentence s;
      for (std::size_t id : group) s.intervals.push_back(session[id]);
      s.start_s = s.intervals.front().start_s;
      s.end_s = group_end;
      detail::Evaluate(s, session, group, policy);
      out.push_back(std::move(s));
      group.clear();
    };
    for (std::size_t i = 0; i < session.size(); ++i) {
      if (!group.empty() && (group.size() >= policy.max_members ||
                             session[i].start_s - group_end > policy.group_gap_s)) {
        flush();
      }
      group_end = group.empty() ? session[i].end_s : std::max(group_end, session[i].end_s);
      group.push_back(i);
    }
    flush();
  }
  return out;
}

inline nlohmann::json SentenceToJson(const Sentence& s) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : s.intervals) {
    members.push_back({{"speaker", m.speaker_id}, {"start", m.start_s}, {"end", m.end_s},
                       {"text", m.text}});
  }
  nlohmann::json j = {{"session", s.intervals.front().session_id},
                      {"span", {s.start_s, s.end_s}},
                      {"members", members},
                      {"kept", s.kept},
                      {"reject_reason", nullptr}};
  if (s.reject_reason) j["reject_reason"] = std::string(RejectReasonName(*s.reject_reason));
  return j;
}

inline std::string ManifestJsonLines(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) out += SentenceToJson(s).dump() + "\n";
  return out;
}

// ---- Token labels ---------------------------------------------------------

struct TokenLabels {
  std::vector<std::string> speakers;
  std::vector<int> changes;
};

// End time in seconds of the downsampled frame `boundary`.
inline double BoundaryTime(std::size_t boundary, double frame_shift_s, std::size_t downsampling) {
  return static_cast<double>(boundary + 1) * static_cast<double>(downsampling) * frame_shift_s;
}

// Token i spans (end of token i-1, end of token i]; its speaker is the
// reference label with the largest overlap (earliest label wins ties). A
// token of zero duration, from several firings in one frame, repeats the
// previous token's label or takes the label in force at that instant.
inline TokenLabels DeriveTokenLabels(const metrics::Segmentation& reference,
                                     const std::vector<std::size_t>& boundaries,
                                     double frame_shift_s, std::size_t downsampling,
                                     double offset_s = 0.0) {
  Require(frame_shift_s > 0 && downsampling > 0, ErrorCode::kConfigError,
          "frame shift and downsampling must be positive");
  TokenLabels out;
  double prev = offset_s;
  const auto& segs = reference.segments();
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    Require(i == 0 || boundaries[i - 1] <= boundaries[i], ErrorCode::kInvalidArgument,
            "boundaries must be sorted");
    const double end = offset_s + BoundaryTime(boundaries[i], frame_shift_s, downsampling);
    std::optional<std::string> label;
    if (end > prev) {
      std::vector<std::pair<std::string, double>> totals;
      for (const auto& s : segs) {
        const double o = std::max(0.0, std::min(end, s.end) - std::max(prev, s.start));
        if (o <= 0) continue;
        auto it = std::find_if(totals.begin(), totals.end(),
                               [&](const auto& t) { return t.first == s.label; });
        if (it == totals.end()) {
          totals.emplace_back(s.label, o);
        } else {
          it->second += o;
        }
      }
      std::size_t best = 0;
      for (std::size_t k = 1; k < totals.size(); ++k)
        if (totals[k].second > totals[best].second) best = k;
      if (!totals.empty()) label = totals[best].first;
    } else if (!out.speakers.empty()) {
      label = out.speakers.back();
    } else {
      for (const auto& s : segs)
        if (s.start < end && end <= s.end) label = s.label;
    }
    if (!label) {
      throw Error(ErrorCode::kUncoveredToken,
                  "token " + std::to_string(i) + " does not overlap the reference");
    }
    out.speakers.push_back(*label);
    prev = std::max(prev, end);
  }
  out.changes.assign(out.speakers.size(), 0);
  for (std::size_t i = 0; i + 1 < out.speakers.size(); ++i) {
    out.changes[i] = out.speakers[i] != out.speakers[i + 1] ? 1 : 0;
  }
  return out;
}

}  // namespace cifscd::corpus
