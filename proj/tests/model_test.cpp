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

#include "cifscd/model.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "gradcheck.hpp"
#include "gtest/gtest.h"
#include "model_fixtures.hpp"
#include "oracles.hpp"

namespace cifscd {
namespace {

using ad::Var;
using model::ModelConfig;
using model::ScdModel;
using testing::RandomTensor;

const std::vector<double> kWorkedWeights = {0.1, 0.5, 0.6, 0.3, 0.6, 0.5,
                                            0.2, 0.1, 0.4, 0.5, 0.2};

bool HasPrefix(const nn::ParameterSet& params, const std::string& prefix) {
  for (const auto& [name, _] : params.entries())
    if (name.rfind(prefix, 0) == 0) return true;
  return false;
}

void ExpectErrorCode(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "no error thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// ---- Config ---------------------------------------------------------------

TEST(ModelConfigTest, JsonRoundTrip) {
  ModelConfig c;
  c.conv_context = 3;
  c.use_content = false;
  c.ams.margin = 0.35;
  c.bce_weight = 0.5;
  const ModelConfig back = model::ModelConfigFromJson(model::ToJson(c));
  EXPECT_EQ(model::ToJson(back), model::ToJson(c));
}

TEST(ModelConfigTest, PartialOverridesKeepDefaults) {
  const auto c = model::ModelConfigFromJson({{"ams", {{"scale", 10.0}}}, {"conv_context", 2}});
  EXPECT_DOUBLE_EQ(c.ams.scale, 10.0);
  EXPECT_DOUBLE_EQ(c.ams.margin, 0.2);
  EXPECT_EQ(c.conv_context, 2u);
  EXPECT_EQ(c.encoder_dim, 16u);
}

TEST(ModelConfigTest, RejectsBadConfigs) {
  ExpectErrorCode(ErrorCode::kConfigError,
                  [] { model::ModelConfigFromJson({{"no_such_key", 1}}); });
  ExpectErrorCode(ErrorCode::kConfigError, [] {
    model::ModelConfigFromJson({{"use_content", false}, {"use_difference", false}});
  });
  ExpectErrorCode(ErrorCode::kConfigError, [] { model::ModelConfigFromJson({{"conv_context", 4}}); });
  ExpectErrorCode(ErrorCode::kConfigError, [] { model::ModelConfigFromJson({{"heads", 3}}); });
  ExpectErrorCode(ErrorCode::kConfigError,
                  [] { model::ModelConfigFromJson({{"loss_weights", {1.0}}}); });
  ExpectErrorCode(ErrorCode::kConfigError,
                  [] { model::ModelConfigFromJson({{"encoder_dim", "wide"}}); });
}

// ---- ASR side -------------------------------------------------------------

TEST(ToyAsrTest, ShapesFollowDownsampling) {
  ScdModel m(ModelConfig{}, 1);
  nn::Rng rng(2);
  const auto b = m.asr.Forward(RandomTensor(rng, 16, 8), 4);
  EXPECT_EQ(b.encoded_frames.rows(), 4u);
  EXPECT_EQ(b.raw_weights.rows(), 4u);
  EXPECT_EQ(b.cif_tokens.rows(), 4u);
  EXPECT_EQ(b.cif_tokens.cols(), 16u);
  EXPECT_EQ(b.decoder_states.rows(), 4u);
  EXPECT_EQ(b.token_count(), 4u);
  EXPECT_EQ(m.asr.VocabLogits(b).cols(), 8u);
}

TEST(ToyAsrTest, SaturatedWeightsGiveIdentityAlignment) {
  ScdModel m(ModelConfig{}, 3);
  for (double& v : m.asr.weight_fc().weight().mutable_value().values()) v = 0.0;
  for (double& v : m.asr.weight_fc().bias().mutable_value().values()) v = 50.0;
  nn::Rng rng(4);
  const auto b = m.asr.Forward(RandomTensor(rng, 24, 8), 6);
  EXPECT_EQ(b.boundaries(), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t d = 0; d < 16; ++d)
      EXPECT_DOUBLE_EQ(b.cif_tokens.value().at(i, d), b.encoded_frames.value().at(i, d));
}

TEST(ToyAsrTest, TokensMatchCumulativeMassOracle) {
  nn::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ScdModel m(ModelConfig{}, 100 + trial);
    const std::size_t U = 2 + rng.Index(12), S = 1 + rng.Index(U);
    const auto b = m.asr.Forward(RandomTensor(rng, 4 * U, 8), S);
    const auto oracle =
        testing::CumulativeMassOracle(b.raw_weights.value().values(), 1.0, S, false);
    EXPECT_EQ(b.boundaries(), oracle.boundaries);
    const Tensor& h = b.encoded_frames.value();
    std::vector<std::vector<double>> rows;
    for (std::size_t u = 0; u < h.rows(); ++u) rows.emplace_back(h.row(u).begin(), h.row(u).end());
    const auto expected = testing::ApplyDense(oracle.coeff, rows);
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t d = 0; d < 16; ++d)
        EXPECT_NEAR(b.cif_tokens.value().at(i, d), expected[i][d], 1e-9);
  }
}

TEST(ToyAsrTest, RejectsWrongFeatureWidthAndShortInput) {
  ScdModel m(ModelConfig{}, 6);
  nn::Rng rng(7);
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { m.asr.Forward(RandomTensor(rng, 8, 5), 1); });
  ExpectErrorCode(ErrorCode::kEmptyInput, [&] { m.asr.Forward(RandomTensor(rng, 3, 8), 1); });
  ExpectErrorCode(ErrorCode::kInvalidArgument, [&] { m.asr.Forward(RandomTensor(rng, 8, 8), 0); });
}

// ---- Speaker path ---------------------------------------------------------

TEST(SpeakerPathTest, WorkedWeightsCombineSpeakerFrames) {
  ScdModel m(ModelConfig{}, 8);
  nn::Rng rng(9);
  const CifAlignment a = ComputeAlignment(kWorkedWeights, CifConfig{}, std::nullopt);
  const auto p = model::SpeakerPathForward(m.speaker, m.classifier, RandomTensor(rng, 44, 8), a);
  const Tensor& z = p.speaker_frames.value();
  const std::vector<std::vector<std::pair<std::size_t, double>>> table = {
      {{0, 0.1}, {1, 0.5}, {2, 0.4}},
      {{2, 0.2}, {3, 0.3}, {4, 0.5}},
      {{4, 0.1}, {5, 0.5}, {6, 0.2}, {7, 0.1}, {8, 0.1}},
      {{8, 0.3}, {9, 0.5}, {10, 0.2}}};
  ASSERT_EQ(p.token_speaker_reps.rows(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t d = 0; d < z.cols(); ++d) {
      double expected = 0;
      for (const auto& [u, w] : table[i]) expected += w * z.at(u, d);
      EXPECT_NEAR(p.token_speaker_reps.value().at(i, d), expected, 1e-9);
    }
  }
}

TEST(SpeakerPathTest, OnesGiveOneTokenPerFrame) {
  ScdModel m(ModelConfig{}, 10);
  nn::Rng rng(11);
  const std::vector<double> ones(5, 1.0);
  const auto p =
      model::SpeakerPathForward(m.speaker, m.classifier, RandomTensor(rng, 20, 8), ones, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t d = 0; d < 16; ++d)
      EXPECT_DOUBLE_EQ(p.token_speaker_reps.value().at(i, d), p.speaker_frames.value().at(i, d));
}

TEST(SpeakerPathTest, PosteriorsAreDistributions) {
  ScdModel m(ModelConfig{}, 12);
  nn::Rng rng(13);
  const auto p = model::SpeakerPathForward(m.speaker, m.classifier, RandomTensor(rng, 40, 8),
                                           std::vector<double>(10, 0.5), 3);
  const Tensor& v = p.posteriors.value();
  ASSERT_EQ(v.rows(), 3u);
  ASSERT_EQ(v.cols(), 4u);
  EXPECT_EQ(p.embeddings.cols(), 8u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = v.row(i);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
    for (double x : row) EXPECT_GE(x, 0.0);
  }
}

TEST(SpeakerPathTest, FrameCountMismatch) {
  ScdModel m(ModelConfig{}, 14);
  nn::Rng rng(15);
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] {
    model::SpeakerPathForward(m.speaker, m.classifier, RandomTensor(rng, 40, 8),
                              std::vector<double>(9, 0.5), 3);
  });
}

TEST(SpeakerPathTest, PooledLogitsIgnoreFrameOrder) {
  ScdModel m(ModelConfig{}, 16);
  nn::Rng rng(17);
  const Tensor z = RandomTensor(rng, 7, 16);
  Tensor reversed = Tensor::Matrix(7, 16);
  for (std::size_t u = 0; u < 7; ++u)
    std::copy(z.row(6 - u).begin(), z.row(6 - u).end(), reversed.row(u).begin());
  const auto a = m.speaker.PooledLogits(ad::Constant(z)).value().values();
  const auto b = m.speaker.PooledLogits(ad::Constant(reversed)).value().values();
  for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
}

// Alignment invariance: the speaker path reuses the ASR alignment.
TEST(SpeakerPathTest, SharesAsrAlignment) {
  ScdModel m(ModelConfig{}, 18);
  nn::Rng rng(19);
  const Tensor frames = RandomTensor(rng, 48, 8);
  const auto b = m.asr.Forward(frames, 5);
  const auto direct = model::SpeakerPathForward(m.speaker, m.classifier, frames,
                                                b.raw_weights.value().values(), 5);
  const CifAlignment again =
      ComputeAlignment(b.raw_weights.value().values(), CifConfig{1.0, CifMode::kTrain}, 5);
  EXPECT_EQ(again.boundaries, b.alignment.boundaries);
  ASSERT_EQ(again.contributions.size(), b.alignment.contributions.size());
  for (std::size_t i = 0; i < again.contributions.size(); ++i) {
    ASSERT_EQ(again.contributions[i].size(), b.alignment.contributions[i].size());
    for (std::size_t j = 0; j < again.contributions[i].size(); ++j) {
      EXPECT_EQ(again.contributions[i][j].frame, b.alignment.contributions[i][j].frame);
      EXPECT_EQ(again.contributions[i][j].coeff, b.alignment.contributions[i][j].coeff);
    }
  }
  const auto shared = model::SpeakerPathForward(m.speaker, m.classifier, frames, b.alignment);
  EXPECT_EQ(shared.token_speaker_reps.value().values(),
            direct.token_speaker_reps.value().values());
}

// ---- SCD head -------------------------------------------------------------

TEST(ScdHeadTest, SingleTokenGivesOneProbability) {
  ScdModel m(ModelConfig{}, 20);
  nn::Rng rng(21);
  const auto p = m.head.Forward(ad::Constant(RandomTensor(rng, 1, 16)),
                                ad::Constant(RandomTensor(rng, 1, 16)),
                                ad::Constant(RandomTensor(rng, 1, 8)));
  ASSERT_EQ(p.rows(), 1u);
  ASSERT_EQ(p.cols(), 1u);
  EXPECT_GT(p.scalar(), 0.0);
  EXPECT_LT(p.scalar(), 1.0);
}

TEST(ScdHeadTest, DifferenceKernelCancelsOnConstantEmbeddings) {
  ScdModel m(ModelConfig{}, 22);
  const std::size_t De = 8;
  Tensor& w = m.head.sde_conv().weight().mutable_value();
  for (double& v : w.values()) v = 0.0;
  for (std::size_t c = 0; c < De; ++c) {
    w.at(0 * De + c, c) = -1.0;
    w.at(2 * De + c, c) = 1.0;
  }
  Tensor m_const = Tensor::Matrix(6, De);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t c = 0; c < De; ++c) m_const.at(i, c) = 0.1 * static_cast<double>(c + 1);
  const Tensor diff = m.head.DifferenceFeatures(ad::Constant(m_const)).value();
  for (std::size_t i = 1; i + 1 < 6; ++i)
    for (std::size_t c = 0; c < De; ++c) EXPECT_DOUBLE_EQ(diff.at(i, c), 0.0);
  // Zero padding leaves the edges as one-sided differences.
  EXPECT_DOUBLE_EQ(diff.at(0, 0), 0.1);
  EXPECT_DOUBLE_EQ(diff.at(5, 0), -0.1);
}

TEST(ScdHeadTest, DisabledCuesHaveNoParametersAndNoInfluence) {
  nn::Rng rng(23);
  const Var c1 = ad::Constant(RandomTensor(rng, 5, 16)), c2 = ad::Constant(RandomTensor(rng, 5, 16));
  const Var o1 = ad::Constant(RandomTensor(rng, 5, 16)), o2 = ad::Constant(RandomTensor(rng, 5, 16));
  const Var m1 = ad::Constant(RandomTensor(rng, 5, 8)), m2 = ad::Constant(RandomTensor(rng, 5, 8));

  ModelConfig diff_only;
  diff_only.use_content = false;
  ScdModel a(diff_only, 24);
  EXPECT_FALSE(HasPrefix(a.head.params(), "head.sce"));
  EXPECT_EQ(a.head.Forward(c1, o1, m1).value().values(), a.head.Forward(c2, o2, m1).value().values());

  ModelConfig content_only;
  content_only.use_difference = false;
  ScdModel b(content_only, 25);
  EXPECT_FALSE(HasPrefix(b.head.params(), "head.sde"));
  EXPECT_EQ(b.head.Forward(c1, o1, m1).value().values(), b.head.Forward(c1, o1, m2).value().values());

  ModelConfig no_conv;
  no_conv.use_conv_in_sde = false;
  ScdModel d(no_conv, 26);
  EXPECT_FALSE(HasPrefix(d.head.params(), "head.sde_conv"));
  EXPECT_TRUE(HasPrefix(d.head.params(), "head.sde_ffn"));
}

TEST(ScdHeadTest, DifferenceCueIsLocalToConvContext) {
  for (std::size_t ctx = 1; ctx <= 3; ++ctx) {
    ModelConfig c;
    c.use_content = false;
    c.conv_context = ctx;
    ScdModel m(c, 30 + ctx);
    nn::Rng rng(40 + ctx);
    const Var dummy = ad::Constant(RandomTensor(rng, 12, 16));
    Tensor emb = RandomTensor(rng, 12, 8);
    const auto before = m.head.Forward(dummy, dummy, ad::Constant(emb)).value().values();
    const std::size_t j = 6;
    for (std::size_t k = 0; k < 8; ++k) emb.at(j, k) += 1.0;
    const auto after = m.head.Forward(dummy, dummy, ad::Constant(emb)).value().values();
    for (std::size_t i = 0; i < 12; ++i) {
      const std::size_t dist = i > j ? i - j : j - i;
      if (dist > ctx) EXPECT_EQ(before[i], after[i]) << "ctx " << ctx << " token " << i;
    }
  }
}

TEST(ScdHeadTest, ContentCountMismatch) {
  ScdModel m(ModelConfig{}, 27);
  nn::Rng rng(28);
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] {
    m.head.Forward(ad::Constant(RandomTensor(rng, 4, 16)), ad::Constant(RandomTensor(rng, 4, 16)),
                   ad::Constant(RandomTensor(rng, 5, 8)));
  });
}

// ---- Joint loss -----------------------------------------------------------

struct LossInputs {
  Var embeddings, class_weights, scores;
  std::vector<std::size_t> speakers;
  std::vector<int> changes;
};

LossInputs RandomLossInputs(std::uint64_t seed) {
  nn::Rng rng(seed);
  LossInputs in;
  in.embeddings = Var::Leaf(RandomTensor(rng, 6, 8));
  in.class_weights = Var::Leaf(RandomTensor(rng, 4, 8));
  Tensor p = Tensor::Matrix(6, 1);
  for (double& v : p.values()) v = rng.Uniform(0.05, 0.95);
  in.scores = Var::Leaf(p);
  for (std::size_t i = 0; i < 6; ++i) {
    in.speakers.push_back(rng.Index(4));
    in.changes.push_back(rng.Bernoulli(0.3) ? 1 : 0);
  }
  return in;
}

TEST(JointLossTest, WeightsSelectTerms) {
  const LossInputs in = RandomLossInputs(50);
  const nn::AmsConfig ams;
  const double a = nn::AmSoftmaxLoss(in.embeddings, in.speakers, in.class_weights, ams).scalar();
  const double b = ad::BinaryCrossEntropy(in.scores, in.changes).scalar();
  auto total = [&](double wa, double wb) {
    return model::ComputeJointLoss(in.embeddings, in.class_weights, in.scores, in.speakers,
                                   in.changes, ams, wa, wb);
  };
  EXPECT_DOUBLE_EQ(total(1, 0).total.scalar(), a);
  EXPECT_DOUBLE_EQ(total(0, 1).total.scalar(), b);
  EXPECT_NEAR(total(0.5, 2).total.scalar(), 0.5 * a + 2 * b, 1e-12);
  EXPECT_DOUBLE_EQ(total(1, 1).ams, a);
  EXPECT_DOUBLE_EQ(total(1, 1).bce, b);
  ExpectErrorCode(ErrorCode::kConfigError, [&] { total(0, 0); });
}

TEST(JointLossTest, ZeroWeightTermGetsNoGradient) {
  LossInputs in = RandomLossInputs(51);
  const auto loss = model::ComputeJointLoss(in.embeddings, in.class_weights, in.scores,
                                            in.speakers, in.changes, nn::AmsConfig{}, 0, 1);
  ad::Backward(loss.total);
  for (double g : in.embeddings.grad()) EXPECT_EQ(g, 0.0);
  double score_grad = 0;
  for (double g : in.scores.grad()) score_grad += std::abs(g);
  EXPECT_GT(score_grad, 0.0);
}

TEST(JointLossTest, LabelCountMismatch) {
  LossInputs in = RandomLossInputs(52);
  in.changes.pop_back();
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] {
    model::ComputeJointLoss(in.embeddings, in.class_weights, in.scores, in.speakers, in.changes,
                            nn::AmsConfig{}, 1, 1);
  });
}

TEST(JointLossTest, SpeakerLabelPermutationInvariance) {
  const LossInputs in = RandomLossInputs(53);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  Tensor permuted = Tensor::Matrix(4, 8);
  for (std::size_t c = 0; c < 4; ++c)
    std::copy(in.class_weights.value().row(c).begin(), in.class_weights.value().row(c).end(),
              permuted.row(perm[c]).begin());
  std::vector<std::size_t> relabeled;
  for (std::size_t s : in.speakers) relabeled.push_back(perm[s]);
  const double a = nn::AmSoftmaxLoss(in.embeddings, in.speakers, in.class_weights, {}).scalar();
  const double b =
      nn::AmSoftmaxLoss(in.embeddings, relabeled, ad::Constant(permuted), {}).scalar();
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(JointLossTest, GradientCheckThroughWholeModel) {
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    EXPECT_LT(testing::JointLossGradientError(1000 + seed), 1e-4) << "seed " << seed;
}

// ---- Model wiring ---------------------------------------------------------

TEST(ScdModelTest, JointParamsExcludeAsr) {
  ScdModel m(ModelConfig{}, 60);
  EXPECT_FALSE(HasPrefix(m.JointParams(), "asr."));
  EXPECT_TRUE(HasPrefix(m.JointParams(), "spk."));
  EXPECT_TRUE(HasPrefix(m.JointParams(), "cls."));
  EXPECT_TRUE(HasPrefix(m.JointParams(), "head."));
  EXPECT_TRUE(HasPrefix(m.AllParams(), "asr."));
  EXPECT_EQ(m.AllParams().NumScalars(),
            m.JointParams().NumScalars() + m.asr.params().NumScalars());
}

TEST(ScdModelTest, SameSeedSameInitialization) {
  ScdModel a(ModelConfig{}, 61), b(ModelConfig{}, 61), c(ModelConfig{}, 62);
  EXPECT_EQ(a.AllParams().Flatten(), b.AllParams().Flatten());
  EXPECT_NE(a.AllParams().Flatten(), c.AllParams().Flatten());
}

// ---- Token decisions to time ----------------------------------------------

TEST(TokensToChangeTimesTest, Examples) {
  const auto one = model::TokensToChangeTimes({3}, {0.7}, 0.01, 4);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one.points()[0].time, 0.16, 1e-12);
  EXPECT_DOUBLE_EQ(one.points()[0].score, 0.7);

  EXPECT_TRUE(model::TokensToChangeTimes({}, {}, 0.01, 4).size() == 0u);

  const auto fig = model::TokensToChangeTimes({3, 5, 9, 11}, {0.1, 0.2, 0.3, 0.4}, 0.01, 1);
  const std::vector<double> expected = {0.04, 0.06, 0.10, 0.12};
  ASSERT_EQ(fig.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(fig.points()[i].time, expected[i], 1e-12);
}

TEST(TokensToChangeTimesTest, SharedFrameKeepsHighestScore) {
  const auto pts = model::TokensToChangeTimes({1, 4, 4, 6}, {0.2, 0.3, 0.9, 0.1}, 0.01, 1);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_NEAR(pts.points()[1].time, 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(pts.points()[1].score, 0.9);
}

TEST(TokensToChangeTimesTest, Errors) {
  ExpectErrorCode(ErrorCode::kInvalidArgument,
                  [] { model::TokensToChangeTimes({4, 2}, {0.1, 0.2}, 0.01, 1); });
  ExpectErrorCode(ErrorCode::kShapeMismatch,
                  [] { model::TokensToChangeTimes({1, 2}, {0.1}, 0.01, 1); });
}

// ---- Frame-level baseline -------------------------------------------------

TEST(BslTest, ZeroOutputLayerGivesHalf) {
  ModelConfig c;
  nn::Rng init(70);
  model::BslBaseline bsl(c, init);
  for (double& v : bsl.out().weight().mutable_value().values()) v = 0.0;
  for (double& v : bsl.out().bias().mutable_value().values()) v = 0.0;
  nn::Rng rng(71);
  const auto scores = bsl.Forward(RandomTensor(rng, 40, 8)).value();
  ASSERT_EQ(scores.rows(), 10u);
  for (double v : scores.values()) EXPECT_EQ(v, 0.5);
}

TEST(BslTest, FrameLabelsUseCollar) {
  const auto labels = model::BslFrameLabels({0.3}, 12, 0.01, 4, 0.05);
  std::vector<int> expected(12, 0);
  expected[6] = expected[7] = 1;  // frames ending at 0.28 and 0.32
  EXPECT_EQ(labels, expected);
  EXPECT_EQ(model::BslFrameLabels({}, 3, 0.01, 4, 0.2), std::vector<int>(3, 0));
}

TEST(BslTest, PeakPickFindsLocalMaxima) {
  const auto pts = model::PeakPick({0.1, 0.5, 0.2, 0.2, 0.7}, 0.01, 4);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts.points()[0].time, 0.08, 1e-12);
  EXPECT_DOUBLE_EQ(pts.points()[0].score, 0.5);
  EXPECT_NEAR(pts.points()[1].time, 0.20, 1e-12);
  EXPECT_TRUE(model::PeakPick({}, 0.01, 4).size() == 0u);
}

}  // namespace
}  // namespace cifscd
