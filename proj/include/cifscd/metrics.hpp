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

// Segmentation purity / coverage, threshold sweeps and equal coverage-purity.
//
//   purity   = sum_h max_r |h ∩ r| / sum_h |h|
//   coverage = sum_r max_h |r ∩ h| / sum_r |r|
//
// Durations are measured only on time labelled by both sides, so unlabelled
// gaps (silence) count for nothing. With non-overlapping segments that makes
// sum_h |h| equal to sum_h sum_r |h ∩ r| and coverage(H, R) identical to
// purity(R, H).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cifscd/errors.hpp"
#include "json.hpp"

namespace cifscd::metrics {

struct Segment {
  double start = 0;
  double end = 0;
  std::string label;
};

class Segmentation {
 public:
  Segmentation() = default;
  explicit Segmentation(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      Require(std::isfinite(s.start) && std::isfinite(s.end) && s.end > s.start,
              ErrorCode::kInvalidArgument, "segment end must exceed start");
      if (i > 0) {
        Require(segments_[i - 1].end <= s.start, ErrorCode::kInvalidArgument,
                "segments must be sorted and non-overlapping");
      }
    }
  }

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  double TotalDuration() const {
    double t = 0;
    for (const auto& s : segments_) t += s.end - s.start;
    return t;
  }

  // Start times of segments whose label differs from the previous segment's.
  std::vector<double> ChangeTimes() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < segments_.size(); ++i) {
      if (segments_[i].label != segments_[i - 1].label) out.push_back(segments_[i].start);
    }
    return out;
  }

 private:
  std::vector<Segment> segments_;
};

struct ChangePoint {
  double time = 0;
  double score = 0;
};

class ScoredChangePoints {
 public:
  ScoredChangePoints() = default;
  explicit ScoredChangePoints(std::vector<ChangePoint> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      Require(std::isfinite(points_[i].time) && std::isfinite(points_[i].score),
              ErrorCode::kInvalidArgument, "change point time and score must be finite");
      if (i > 0) {
        Require(points_[i - 1].time < points_[i].time, ErrorCode::kInvalidArgument,
                "change point times must be strictly increasing");
      }
    }
  }
  const std::vector<ChangePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<ChangePoint> points_;
};

struct Span {
  double start = 0;
  double end = 0;
};

// Partitions the span at every point whose score exceeds theta (strictly).
// Points on or outside the span edges cannot split it and are ignored.
inline Segmentation CutSegments(Span span, const ScoredChangePoints& points, double theta) {
  Require(std::isfinite(span.start) && std::isfinite(span.end) && span.end > span.start,
          ErrorCode::kEmptySpan, "audio span is empty");
  std::vector<Segment> segments;
  double start = span.start;
  for (const ChangePoint& p : points.points()) {
    if (!(p.score > theta)) continue;
    if (p.time <= start || p.time >= span.end) continue;
    segments.push_back({start, p.time, {}});
    start = p.time;
  }
  segments.push_back({start, span.end, {}});
  return Segmentation(std::move(segments));
}

inline double Overlap(const Segment& a, const Segment& b) {
  return std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

// Numerator and denominator of purity(H, R); coverage is the same with the
// arguments swapped. Sums run over `hyp` in order and, within each, over
// `ref` in order.
struct Ratio {
  double numerator = 0;
  double denominator = 0;
};

inline Ratio PurityTerms(const Segmentation& hyp, const Segmentation& ref) {
  Ratio out;
  const auto& r = ref.segments();
  std::size_t first = 0;
  for (const Segment& h : hyp.segments()) {
    while (first < r.size() && r[first].end <= h.start) ++first;
    double best = 0, covered = 0;
    for (std::size_t j = first; j < r.size() && r[j].start < h.end; ++j) {
      const double o = Overlap(h, r[j]);
      best = std::max(best, o);
      covered += o;
    }
    out.numerator += best;
    out.denominator += covered;
  }
  return out;
}

inline double Purity(const Segmentation& hyp, const Segmentation& ref) {
  Require(!hyp.empty() && !ref.empty(), ErrorCode::kEmptySegmentation, "empty segmentation");
  const Ratio t = PurityTerms(hyp, ref);
  Require(t.denominator > 0, ErrorCode::kEmptySegmentation,
          "hypothesis and reference share no labelled time");
  return t.numerator / t.denominator;
}

inline double Coverage(const Segmentation& hyp, const Segmentation& ref) {
  return Purity(ref, hyp);
}

// Corpus-level accumulation: numerators and denominators are summed over
// documents before dividing.
struct PurityCoverageTally {
  Ratio purity;
  Ratio coverage;

  void Add(const Segmentation& hyp, const Segmentation& ref) {
    const Ratio p = PurityTerms(hyp, ref);
    const Ratio c = PurityTerms(ref, hyp);
    purity.numerator += p.numerator;
    purity.denominator += p.denominator;
    coverage.numerator += c.numerator;
    coverage.denominator += c.denominator;
  }

  double Purity() const {
    Require(purity.denominator > 0, ErrorCode::kEmptySegmentation, "no labelled time");
    return purity.numerator / purity.denominator;
  }
  double Coverage() const {
    Require(coverage.denominator > 0, ErrorCode::kEmptySegmentation, "no labelled time");
    return coverage.numerator / coverage.denominator;
  }
};

struct SweepConfig {
  std::vector<double> theta_grid;

  // 0, step, 2*step, ..., 1. Grid values are i/n to avoid drift.
  static SweepConfig Uniform(double step = 0.01) {
    Require(step > 0 && step <= 1, ErrorCode::kConfigError, "theta step must be in (0, 1]");
    const auto n = static_cast<long>(std::llround(1.0 / step));
    Require(n >= 1 && std::abs(static_cast<double>(n) * step - 1.0) < 1e-9,
            ErrorCode::kConfigError, "theta step must divide 1");
    SweepConfig c;
    for (long i = 0; i <= n; ++i) c.theta_grid.push_back(static_cast<double>(i) / static_cast<double>(n));
    return c;
  }

  void Validate() const {
    Require(!theta_grid.empty(), ErrorCode::kConfigError, "theta grid is empty");
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
      Require(theta_grid[i] >= 0 && theta_grid[i] <= 1, ErrorCode::kConfigError,
              "theta outside [0, 1]");
      if (i > 0) Require(theta_grid[i - 1] < theta_grid[i], ErrorCode::kConfigError,
                         "theta grid must be increasing");
    }
  }
};

struct CurvePoint {
  double theta = 0;
  double purity = 0;
  double coverage = 0;
};

// One scored document: its audio span, candidate points and reference.
struct ScoredDocument {
  Span span;
  ScoredChangePoints points;
  Segmentation reference;
};

inline std::vector<CurvePoint> SweepCurve(const std::vector<ScoredDocument>& docs,
                                          const SweepConfig& config) {
  config.Validate();
  Require(!docs.empty(), ErrorCode::kEmptySegmentation, "no documents to evaluate");
  std::vector<CurvePoint> curve;
  for (double theta : config.theta_grid) {
    PurityCoverageTally tally;
    for (const auto& doc : docs) {
      Require(!doc.reference.empty(), ErrorCode::kEmptySegmentation, "empty reference");
      tally.Add(CutSegments(doc.span, doc.points, theta), doc.reference);
    }
    curve.push_back({theta, tally.Purity(), tally.Coverage()});
  }
  return curve;
}

// Single document; the span is the reference extent.
inline std::vector<CurvePoint> SweepCurve(const ScoredChangePoints& points,
                                          const Segmentation& reference,
                                          const SweepConfig& config) {
  Require(!reference.empty(), ErrorCode::kEmptySegmentation, "empty reference");
  return SweepCurve({{{reference.segments().front().start, reference.segments().back().end},
                      points, reference}},
                    config);
}

struct EcpResult {
  double ecp = 0;
  double theta = 0;
  bool interpolated = false;
  // False when purity - coverage never changes sign on the grid; the value
  // then comes from the closest grid point.
  bool crossing_found = true;
};

inline EcpResult Ecp(const std::vector<CurvePoint>& curve) {
  Require(!curve.empty(), ErrorCode::kEmptyCurve, "curve is empty");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d0 = curve[i].purity - curve[i].coverage;
    if (d0 == 0) return {curve[i].purity, curve[i].theta, false, true};
    if (i + 1 == curve.size()) break;
    const double d1 = curve[i + 1].purity - curve[i + 1].coverage;
    if ((d0 < 0) != (d1 < 0) && d1 != 0) {
      const double t = d0 / (d0 - d1);
      const double theta = curve[i].theta + t * (curve[i + 1].theta - curve[i].theta);
      const double value = curve[i].purity + t * (curve[i + 1].purity - curve[i].purity);
      return {value, theta, true, true};
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (std::abs(curve[i].purity - curve[i].coverage) <
        std::abs(curve[best].purity - curve[best].coverage)) {
      best = i;
    }
  }
  return {0.5 * (curve[best].purity + curve[best].coverage), curve[best].theta, false, false};
}

inline std::string FormatCurveCsv(const std::vector<CurvePoint>& curve) {
  std::string out = "theta,purity,coverage\n";
  char line[96];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", p.theta, p.purity, p.coverage);
    out += line;
  }
  return out;
}

inline std::vector<CurvePoint> ParseCurveCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<CurvePoint> curve;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "theta,purity,coverage") throw ParseError(1, "bad curve header");
      continue;
    }
    if (line.empty()) continue;
    CurvePoint p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.theta, &p.purity, &p.coverage) != 3) {
      throw ParseError(line_no, "expected theta,purity,coverage");
    }
    curve.push_back(p);
  }
  return curve;
}

inline nlohmann::json EcpToJson(const EcpResult& r) {
  return {{"ecp", r.ecp}, {"theta", r.theta}, {"interpolated", r.interpolated}};
}

}  // namespace cifscd::metrics
