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

#include "cifscd/corpus.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "gtest/gtest.h"

namespace cifscd::corpus {
namespace {

AnnotationInterval Iv(const std::string& speaker, double start, double end,
                      const std::string& session = "s1") {
  return {session, speaker, start, end, ""};
}

std::vector<Sentence> Build(const std::vector<AnnotationInterval>& ivs, bool test_set = false) {
  SentencePolicy p;
  p.test_set = test_set;
  return BuildSentences(ivs, p);
}

std::size_t KeptCount(const std::vector<Sentence>& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](const Sentence& x) { return x.kept; }));
}

TEST(ParseAnnotationsTest, EmptyInput) { EXPECT_TRUE(ParseAnnotations(std::string()).empty()); }

TEST(ParseAnnotationsTest, OneLine) {
  const auto ivs = ParseAnnotations("SPEAKER meet1 1.250 3.500 spkA hello  there\n");
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_EQ(ivs[0].session_id, "meet1");
  EXPECT_EQ(ivs[0].speaker_id, "spkA");
  EXPECT_EQ(ivs[0].start_s, 1.25);
  EXPECT_EQ(ivs[0].end_s, 3.5);
  EXPECT_EQ(ivs[0].text, "hello  there");
}

TEST(ParseAnnotationsTest, SkipsBlankAndCommentLines) {
  const auto ivs = ParseAnnotations("# header\n\n   \nSPEAKER m 0.000 1.000 a\n");
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_TRUE(ivs[0].text.empty());
}

TEST(ParseAnnotationsTest, SortsBySessionThenStart) {
  const auto ivs = ParseAnnotations(
      "SPEAKER b 0.000 1.000 x\nSPEAKER a 5.000 6.000 y\nSPEAKER a 2.000 3.000 z\n");
  ASSERT_EQ(ivs.size(), 3u);
  EXPECT_EQ(ivs[0].speaker_id, "z");
  EXPECT_EQ(ivs[1].speaker_id, "y");
  EXPECT_EQ(ivs[2].speaker_id, "x");
}

TEST(ParseAnnotationsTest, EndNotAfterStartReportsLine) {
  try {
    ParseAnnotations("SPEAKER m 0.000 1.000 a\nSPEAKER m 2.000 2.000 b\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ParseAnnotationsTest, MalformedLines) {
  EXPECT_THROW(ParseAnnotations("SPKR m 0 1 a\n"), ParseError);
  EXPECT_THROW(ParseAnnotations("SPEAKER m 0.000 1.000\n"), ParseError);
  EXPECT_THROW(ParseAnnotations("SPEAKER m zero 1.000 a\n"), ParseError);
  EXPECT_THROW(ParseAnnotations("SPEAKER m 0.5x 1.000 a\n"), ParseError);
  EXPECT_THROW(ParseAnnotations("SPEAKER m 0 inf a\n"), ParseError);
}

TEST(FormatSecondsTest, AtLeastThreeDecimals) {
  EXPECT_EQ(FormatSeconds(1.0), "1.000");
  EXPECT_EQ(FormatSeconds(0.25), "0.250");
  EXPECT_EQ(FormatSeconds(12.3456), "12.3456");
}

TEST(SerializeAnnotationsTest, RoundTripIsLossless) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0.0, 5000.0), d(1e-3, 30.0);
  std::uniform_int_distribution<int> pick(0, 3), words(0, 4);
  const std::vector<std::string> vocab = {"alpha", "beta", "ga-mma", "δέλτα"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AnnotationInterval> ivs;
    for (int i = 0; i < 8; ++i) {
      AnnotationInterval a;
      a.session_id = "sess" + std::to_string(pick(rng));
      a.speaker_id = "spk" + std::to_string(pick(rng));
      a.start_s = t(rng);
      a.end_s = a.start_s + d(rng);
      const int n = words(rng);
      for (int w = 0; w < n; ++w) a.text += (w ? " " : "") + vocab[pick(rng)];
      ivs.push_back(a);
    }
    std::stable_sort(ivs.begin(), ivs.end(), [](const auto& x, const auto& y) {
      return std::tie(x.session_id, x.start_s, x.end_s) < std::tie(y.session_id, y.start_s, y.end_s);
    });
    EXPECT_EQ(ParseAnnotations(SerializeAnnotations(ivs)), ivs);
  }
}

TEST(BuildSentencesTest, SameSpeakerWithShortGapIsKept) {
  const auto s = Build({Iv("a", 0, 2), Iv("a", 3, 5)});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s[0].kept);
  EXPECT_EQ(s[0].start_s, 0);
  EXPECT_EQ(s[0].end_s, 5);
  EXPECT_DOUBLE_EQ(s[0].silence_s, 1.0);
}

TEST(BuildSentencesTest, OverlapDurationRule) {
  // 1.5 s of two-speaker overlap.
  const auto s = Build({Iv("a", 0, 5), Iv("b", 3.5, 8)});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_FALSE(s[0].kept);
  EXPECT_EQ(s[0].reject_reason, RejectReason::kOverlapDuration);
  EXPECT_DOUBLE_EQ(s[0].overlap_s, 1.5);
}

TEST(BuildSentencesTest, OverlapRatioRule) {
  // 0.3 s overlap is 15% of the 2 s interval but well under 1 s.
  const auto s = Build({Iv("a", 0, 2), Iv("b", 1.7, 12)});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_FALSE(s[0].kept);
  EXPECT_EQ(s[0].reject_reason, RejectReason::kOverlapRatio);
}

TEST(BuildSentencesTest, OverlapAtThresholdIsKept) {
  const auto s = Build({Iv("a", 0, 20), Iv("b", 19, 40)});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s[0].kept);
  EXPECT_DOUBLE_EQ(s[0].overlap_s, 1.0);
}

TEST(BuildSentencesTest, LongSilenceRule) {
  // Each gap is under the grouping limit but together they exceed 10 s.
  const auto s = Build({Iv("a", 0, 1), Iv("b", 6, 7), Iv("c", 12.5, 13.5)});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_FALSE(s[0].kept);
  EXPECT_EQ(s[0].reject_reason, RejectReason::kLongSilence);
  EXPECT_DOUBLE_EQ(s[0].silence_s, 10.5);
}

TEST(BuildSentencesTest, NoChangeFilterOnlyInTestSet) {
  const std::vector<AnnotationInterval> ivs = {Iv("a", 0, 2), Iv("a", 3, 5)};
  EXPECT_TRUE(Build(ivs, false)[0].kept);
  const auto s = Build(ivs, true);
  EXPECT_FALSE(s[0].kept);
  EXPECT_EQ(s[0].reject_reason, RejectReason::kNoChangeTestFilter);
  EXPECT_TRUE(Build({Iv("a", 0, 2), Iv("b", 3, 5)}, true)[0].kept);
}

TEST(BuildSentencesTest, GroupsAtMostFourIntervals) {
  std::vector<AnnotationInterval> ivs;
  for (int i = 0; i < 9; ++i) ivs.push_back(Iv(i % 2 ? "a" : "b", 2.0 * i, 2.0 * i + 1.5));
  const auto s = Build(ivs);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].intervals.size(), 4u);
  EXPECT_EQ(s[1].intervals.size(), 4u);
  EXPECT_EQ(s[2].intervals.size(), 1u);
  EXPECT_EQ(KeptCount(s), 3u);
}

TEST(BuildSentencesTest, LongGapStartsNewSentence) {
  const auto s = Build({Iv("a", 0, 1), Iv("b", 11.5, 12)});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(s[0].kept);
  EXPECT_TRUE(s[1].kept);
}

TEST(BuildSentencesTest, SessionsAreIndependent) {
  const auto s = Build({Iv("a", 0, 1, "x"), Iv("b", 0.5, 2, "y")});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(s[0].kept);
  EXPECT_TRUE(s[1].kept);
}

TEST(BuildSentencesTest, OverlapWithIntervalOutsideSentenceCounts) {
  // Sentence one holds the first four intervals; the fifth overlaps its last.
  std::vector<AnnotationInterval> ivs = {Iv("a", 0, 10), Iv("b", 10, 20), Iv("a", 20, 30),
                                         Iv("b", 30, 40), Iv("c", 38.5, 50)};
  const auto s = Build(ivs);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].intervals.size(), 4u);
  EXPECT_EQ(s[0].reject_reason, RejectReason::kOverlapDuration);
  EXPECT_EQ(s[1].reject_reason, RejectReason::kOverlapDuration);
}

TEST(BuildSentencesTest, ManifestLine) {
  const auto s = Build({Iv("a", 0, 5), Iv("b", 3.5, 8)});
  const auto j = nlohmann::json::parse(ManifestJsonLines(s));
  EXPECT_EQ(j["session"], "s1");
  EXPECT_EQ(j["kept"], false);
  EXPECT_EQ(j["reject_reason"], "OverlapDuration");
  EXPECT_EQ(j["members"].size(), 2u);
  EXPECT_EQ(j["span"][1], 8.0);
  EXPECT_EQ(ManifestJsonLines({}), "");
}

std::vector<AnnotationInterval> RandomSession(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dur(0.3, 8.0), step(-1.5, 7.0);
  std::uniform_int_distribution<int> spk(0, 2), count(1, 14), sess(0, 2);
  std::vector<AnnotationInterval> ivs;
  for (int s = 0, n_sess = sess(rng) + 1; s < n_sess; ++s) {
    double t = 0;
    for (int i = 0, n = count(rng); i < n; ++i) {
      const double d = dur(rng);
      ivs.push_back(Iv("spk" + std::to_string(spk(rng)), t, t + d, "m" + std::to_string(s)));
      t = std::max(0.0, t + d + step(rng));
    }
  }
  return ivs;
}

TEST(BuildSentencesProperty, LooseningThresholdsNeverDropsSentences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> sec(0.0, 3.0), ratio(0.0, 0.4), sil(0.0, 15.0),
      loosen(0.0, 2.0);
  std::bernoulli_distribution test_set(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ivs = RandomSession(rng);
    SentencePolicy strict;
    strict.max_overlap_s = sec(rng);
    strict.max_overlap_ratio = ratio(rng);
    strict.max_silence_s = sil(rng);
    strict.test_set = test_set(rng);
    SentencePolicy loose = strict;
    loose.max_overlap_s += loosen(rng);
    loose.max_overlap_ratio += 0.1 * loosen(rng);
    loose.max_silence_s += loosen(rng);
    const auto a = BuildSentences(ivs, strict);
    const auto b = BuildSentences(ivs, loose);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_LE(KeptCount(a), KeptCount(b));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].kept) EXPECT_TRUE(b[i].kept);
    }
  }
}

TEST(BuildSentencesProperty, SentencesCoverTheirMembers) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ivs = RandomSession(rng);
    std::size_t members = 0;
    for (const auto& s : BuildSentences(ivs, {})) {
      ASSERT_GE(s.intervals.size(), 1u);
      ASSERT_LE(s.intervals.size(), 4u);
      members += s.intervals.size();
      for (const auto& m : s.intervals) {
        EXPECT_LE(s.start_s, m.start_s);
        EXPECT_GE(s.end_s, m.end_s);
      }
      EXPECT_EQ(s.kept, !s.reject_reason.has_value());
    }
    EXPECT_EQ(members, ivs.size());
  }
}

metrics::Segmentation Ref(std::vector<metrics::Segment> segs) {
  return metrics::Segmentation(std::move(segs));
}

TEST(DeriveTokenLabelsTest, SingleSpeakerHasNoChanges) {
  const auto l = DeriveTokenLabels(Ref({{0, 1.0, "a"}}), {1, 4, 9}, 0.1, 1);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"a", "a", "a"}));
  EXPECT_EQ(l.changes, (std::vector<int>{0, 0, 0}));
}

TEST(DeriveTokenLabelsTest, SplitAtTokenBoundary) {
  const auto l = DeriveTokenLabels(Ref({{0, 0.12, "a"}, {0.12, 0.24, "b"}}),
                                   {3, 7, 11, 15, 19, 23}, 0.01, 1);
  EXPECT_EQ(l.changes, (std::vector<int>{0, 0, 1, 0, 0, 0}));
}

TEST(DeriveTokenLabelsTest, DownsamplingScalesTime) {
  // Token ends at (b + 1) * 4 * 0.01 = 0.16, 0.32.
  const auto l = DeriveTokenLabels(Ref({{0, 0.2, "a"}, {0.2, 0.32, "b"}}), {3, 7}, 0.01, 4);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"a", "b"}));
}

TEST(DeriveTokenLabelsTest, StraddlingTokenTakesMajoritySpeaker) {
  const auto l = DeriveTokenLabels(Ref({{0, 0.7, "a"}, {0.7, 2.0, "b"}}), {9, 19}, 0.1, 1);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(l.changes, (std::vector<int>{1, 0}));
}

TEST(DeriveTokenLabelsTest, EvenSplitGoesToEarlierSpeaker) {
  const auto l = DeriveTokenLabels(Ref({{0, 0.5, "b"}, {0.5, 1.0, "a"}}), {9}, 0.1, 1);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"b"}));
}

TEST(DeriveTokenLabelsTest, OverlapIsSummedPerSpeaker) {
  const auto l = DeriveTokenLabels(
      Ref({{0, 0.3, "a"}, {0.3, 0.7, "b"}, {0.7, 1.0, "a"}}), {9}, 0.1, 1);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"a"}));
}

TEST(DeriveTokenLabelsTest, ZeroLengthTokenRepeatsPreviousLabel) {
  const auto l = DeriveTokenLabels(Ref({{0, 0.5, "a"}, {0.5, 1.0, "b"}}), {4, 4, 9}, 0.1, 1);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"a", "a", "b"}));
  EXPECT_EQ(l.changes, (std::vector<int>{0, 1, 0}));
}

TEST(DeriveTokenLabelsTest, UncoveredToken) {
  try {
    DeriveTokenLabels(Ref({{0, 0.5, "a"}}), {9, 19}, 0.1, 1);
    FAIL() << "expected UncoveredToken";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUncoveredToken);
  }
}

TEST(DeriveTokenLabelsTest, OffsetShiftsTokenTimes) {
  const auto l = DeriveTokenLabels(Ref({{10, 10.5, "a"}, {10.5, 11, "b"}}), {4, 9}, 0.1, 1, 10.0);
  EXPECT_EQ(l.speakers, (std::vector<std::string>{"a", "b"}));
}

TEST(DeriveTokenLabelsTest, EmptyBoundaries) {
  const auto l = DeriveTokenLabels(Ref({{0, 1, "a"}}), {}, 0.1, 1);
  EXPECT_TRUE(l.speakers.empty());
  EXPECT_TRUE(l.changes.empty());
}

TEST(DeriveTokenLabelsProperty, ChangeCountEqualsLabelTransitions) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> spk(0, 2), seg_len(1, 30), step(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<metrics::Segment> segs;
    int frame = 0;
    for (int i = 0, n = 1 + spk(rng) * 3; i < n; ++i) {
      const int len = seg_len(rng);
      segs.push_back({frame * 0.01, (frame + len) * 0.01, "s" + std::to_string(spk(rng))});
      frame += len;
    }
    std::vector<std::size_t> boundaries;
    for (int b = step(rng); b < frame; b += step(rng)) boundaries.push_back(b);
    const auto l = DeriveTokenLabels(Ref(segs), boundaries, 0.01, 1);
    ASSERT_EQ(l.changes.size(), boundaries.size());
    int transitions = 0, ones = 0;
    for (std::size_t i = 0; i + 1 < l.speakers.size(); ++i)
      transitions += l.speakers[i] != l.speakers[i + 1];
    for (int c : l.changes) ones += c;
    EXPECT_EQ(ones, transitions);
    if (!l.changes.empty()) EXPECT_EQ(l.changes.back(), 0);
  }
}

}  // namespace
}  // namespace cifscd::corpus
