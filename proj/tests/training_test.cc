// Copyright 2026-present the mmlsr project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cmath>

#include <gtest/gtest.h>

#include "mmlsr/error.h"
#include "mmlsr/training.h"
#include "test_support.h"

namespace mmlsr {
namespace {

using testing::Sv;

TEST(InfoNceTest, Examples) {
  EXPECT_EQ(InfoNceLoss({{3.7}}, 1.0), 0.0);
  ScoreMatrix flat(4, std::vector<double>(4, 0.25));
  EXPECT_NEAR(InfoNceLoss(flat, 1.0), 1.3862943611198906, 1e-12);
  EXPECT_NEAR(InfoNceLoss({{2.0, 0.0}, {0.0, 2.0}}, 1.0), 0.12692801104297238,
              1e-12);
}

TEST(InfoNceTest, TemperatureScalesScores) {
  ScoreMatrix s = {{1.0, 0.5, -0.2}, {0.3, 0.9, 0.1}, {0.0, 0.4, 1.1}};
  ScoreMatrix doubled = s;
  for (auto& row : doubled) {
    for (auto& x : row) x *= 2.0;
  }
  EXPECT_NEAR(InfoNceLoss(doubled, 2.0), InfoNceLoss(s, 1.0), 1e-14);
}

TEST(InfoNceTest, StableForLargeScores) {
  double l = InfoNceLoss({{1000.0, 0.0}, {0.0, 1000.0}}, 1.0);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_GE(l, 0.0);
  EXPECT_NEAR(InfoNceLoss({{0.0, 800.0}, {0.0, 0.0}}, 1.0), 400.0 + std::log(2.0) / 2,
              1e-9);
}

TEST(InfoNceTest, RejectsNonSquareOrBadTemperature) {
  EXPECT_THROW(InfoNceLoss({{1.0, 2.0}}, 1.0), ContractViolation);
  EXPECT_EQ(InfoNceLoss({}, 1.0), 0.0);
  EXPECT_THROW(InfoNceLoss({{1.0}}, 0.0), ContractViolation);
}

TEST(InfoNceTest, SymmetricRowGivesOpposingDocumentFactors) {
  // Query 0 scores its positive and its negative equally: the softmax factors
  // of the two documents are (0.5 - 1) and 0.5, scaled by 1/(B tau).
  ScoreMatrix s = {{1.5, 1.5}, {0.2, 0.9}};
  auto g = InfoNceScoreGradient(s, 1.0);
  EXPECT_NEAR(g[0][0], -0.25, 1e-15);
  EXPECT_NEAR(g[0][1], 0.25, 1e-15);
  EXPECT_EQ(g[0][0], -g[0][1]);
}

TEST(InfoNceTest, ScoreGradientMatchesFiniteDifferences) {
  Rng rng(2);
  ScoreMatrix s(5, std::vector<double>(5));
  for (auto& row : s) {
    for (auto& x : row) x = rng.uniform(-2.0, 2.0);
  }
  const double tau = 0.7;
  auto g = InfoNceScoreGradient(s, tau);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      auto up = s, down = s;
      up[i][j] += 1e-6;
      down[i][j] -= 1e-6;
      const double n = (InfoNceLoss(up, tau) - InfoNceLoss(down, tau)) / 2e-6;
      EXPECT_NEAR(g[i][j], n, 1e-8);
    }
  }
}

TEST(FlopsTest, Examples) {
  std::vector<SparseVector> empty(3);
  EXPECT_EQ(FlopsPenalty(empty, 10), 0.0);
  std::vector<SparseVector> one = {Sv({{0, 2.0}})};
  EXPECT_EQ(FlopsPenalty(one, 10), 4.0);
  std::vector<SparseVector> two = {Sv({{0, 1.0}}), Sv({{0, 3.0}})};
  EXPECT_EQ(FlopsPenalty(two, 10), 4.0);
  std::vector<SparseVector> spread = {Sv({{0, 1.0}}), Sv({{1, 1.0}})};
  EXPECT_EQ(FlopsPenalty(spread, 10), 0.5);
}

TrainingConfig Cfg(double lambda = 0.0) {
  TrainingConfig c;
  c.temperature = 1.0;
  c.flops_lambda = lambda;
  return c;
}

TEST(BackwardTest, FlatRegionGivesZeroGradients) {
  Rng rng(4);
  auto g = testing::RandomGradInstance(rng, Variant::kM2, 8, 32, 4);
  for (auto& w : g.params.mlp->W) w = 0.0;
  g.params.mlp->b = -1.0;
  for (auto& b : g.params.doc_mlm->bias) b = -100.0;
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  auto lg = Backward(g.batch, enc, Cfg(0.3), g.params);
  EXPECT_NEAR(lg.loss.infonce, std::log(4.0), 1e-12);
  ModelParams zero = ZerosLike(g.params);
  EXPECT_EQ(lg.gradients, zero);
  auto check = FiniteDiffCheck(g.batch, enc, Cfg(0.3), g.params, 1e-5);
  EXPECT_LT(check.max_error, 1e-9);
}

TEST(BackwardTest, LossMatchesComputeLoss) {
  Rng rng(6);
  for (auto v : {Variant::kM1, Variant::kM2, Variant::kM3, Variant::kM4}) {
    auto g = testing::RandomGradInstance(rng, v, 8, 32, 4);
    EncoderConfig enc{v, Fusion::kSum, std::nullopt};
    auto a = Backward(g.batch, enc, Cfg(0.01), g.params).loss;
    auto b = ComputeLoss(g.batch, enc, Cfg(0.01), g.params);
    EXPECT_EQ(a.infonce, b.infonce);
    EXPECT_EQ(a.flops, b.flops);
    EXPECT_EQ(a.total, b.total);
    EXPECT_DOUBLE_EQ(b.total, b.infonce + 0.01 * b.flops);
  }
}

class GradCheckTest : public ::testing::TestWithParam<std::tuple<Variant, Fusion>> {};

TEST_P(GradCheckTest, MatchesFiniteDifferences) {
  const auto [variant, fusion] = GetParam();
  Rng rng(DeriveSeed(21, static_cast<std::uint64_t>(variant) * 2 +
                             static_cast<std::uint64_t>(fusion)));
  EncoderConfig enc{variant, fusion, std::nullopt};
  for (int trial = 0; trial < 10; ++trial) {
    auto g = testing::RandomGradInstance(rng, variant, 8, 32, 4);
    auto r = FiniteDiffCheck(g.batch, enc, Cfg(trial % 2 ? 0.05 : 0.0), g.params,
                             1e-5);
    EXPECT_GT(r.coordinates_checked, 0u);
    EXPECT_LT(r.max_error, 1e-4) << r.worst_coordinate;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Variants, GradCheckTest,
    ::testing::Values(std::tuple{Variant::kM1, Fusion::kSum},
                      std::tuple{Variant::kM2, Fusion::kSum},
                      std::tuple{Variant::kM3, Fusion::kSum},
                      std::tuple{Variant::kM4, Fusion::kSum},
                      std::tuple{Variant::kM4, Fusion::kMax}));

TEST(GradCheck, LinearRegionIsTight) {
  // Every ReLU active, every term occurring once: the loss is smooth and the
  // central difference error is second order.
  Rng rng(12);
  auto g = testing::RandomGradInstance(rng, Variant::kM2, 8, 32, 4);
  g.params.mlp->b = 5.0;
  for (auto& b : g.params.doc_mlm->bias) b = 5.0;
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  auto r = FiniteDiffCheck(g.batch, enc, Cfg(), g.params, 1e-5);
  EXPECT_LT(r.max_error, 1e-6) << r.worst_coordinate;
}

TEST(GradCheck, SubsamplingChecksRequestedCount) {
  Rng rng(13);
  auto g = testing::RandomGradInstance(rng, Variant::kM2, 8, 32, 4);
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  auto r = FiniteDiffCheck(g.batch, enc, Cfg(), g.params, 1e-5, 17, 3);
  EXPECT_EQ(r.coordinates_checked, 17u);
  EXPECT_THROW(FiniteDiffCheck(g.batch, enc, Cfg(), g.params, 0.0),
               ContractViolation);
  EXPECT_THROW(FiniteDiffCheck(g.batch, enc, Cfg(), g.params, 1e-2),
               ContractViolation);
}

TEST(TrainingConfigTest, Validation) {
  TrainingConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), ContractViolation);
  c = TrainingConfig{};
  c.learning_rate = -0.1;
  EXPECT_THROW(c.Validate(), ContractViolation);
  c = TrainingConfig{};
  c.temperature = 0.0;
  EXPECT_THROW(c.Validate(), ContractViolation);
}

class TrainTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    options_ = new SyntheticOptions();
    options_->pairs = 64;
    options_->held_out = 16;
    corpus_ = new SyntheticCorpus(MakeSyntheticCorpus(*options_));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete options_;
  }

  static SyntheticOptions* options_;
  static SyntheticCorpus* corpus_;
};

SyntheticOptions* TrainTest::options_ = nullptr;
SyntheticCorpus* TrainTest::corpus_ = nullptr;

TEST_F(TrainTest, ZeroLearningRateLeavesParamsUnchanged) {
  EncoderConfig enc{Variant::kM4, Fusion::kSum, std::nullopt};
  ToyEmbeddingProvider toy(options_->dim, options_->seed);
  auto initial = InitParams(enc, corpus_->vocab.size(), options_->dim,
                            options_->dim, 5);
  TrainingConfig c;
  c.learning_rate = 0.0;
  c.epochs = 2;
  c.batch_size = 8;
  auto r = Train(corpus_->train_pairs, corpus_->queries, corpus_->corpus, c, enc,
                 corpus_->vocab, {&toy, &corpus_->images}, initial);
  EXPECT_EQ(r.params, initial);
  EXPECT_EQ(r.steps.size(), 2u * 6u);
}

TEST_F(TrainTest, SinglePairBatchHasZeroLoss) {
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  ToyEmbeddingProvider toy(options_->dim, options_->seed);
  auto initial = InitParams(enc, corpus_->vocab.size(), options_->dim,
                            options_->dim, 5);
  TrainingConfig c;
  c.batch_size = 1;
  c.epochs = 3;
  std::vector<TrainingPair> one = {corpus_->train_pairs[0]};
  auto r = Train(one, corpus_->queries, corpus_->corpus, c, enc, corpus_->vocab,
                 {&toy, &corpus_->images}, initial);
  ASSERT_EQ(r.steps.size(), 3u);
  for (const auto& s : r.steps) EXPECT_EQ(s.loss.infonce, 0.0);
  EXPECT_EQ(r.params, initial);
}

TEST_F(TrainTest, PartialLastBatchIsKept) {
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  ToyEmbeddingProvider toy(options_->dim, options_->seed);
  auto initial = InitParams(enc, corpus_->vocab.size(), options_->dim,
                            options_->dim, 5);
  TrainingConfig c;
  c.batch_size = 20;
  c.epochs = 1;
  auto r = Train(corpus_->train_pairs, corpus_->queries, corpus_->corpus, c, enc,
                 corpus_->vocab, {&toy, &corpus_->images}, initial);
  EXPECT_EQ(r.steps.size(), 3u);  // 48 pairs: 20 + 20 + 8
}

TEST_F(TrainTest, DeterministicForSeed) {
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  ToyEmbeddingProvider toy(options_->dim, options_->seed);
  auto initial = InitParams(enc, corpus_->vocab.size(), options_->dim,
                            options_->dim, 5);
  auto c = testing::ToyTrainingConfig();
  c.batch_size = 8;
  auto a = Train(corpus_->train_pairs, corpus_->queries, corpus_->corpus, c, enc,
                 corpus_->vocab, {&toy, &corpus_->images}, initial);
  auto b = Train(corpus_->train_pairs, corpus_->queries, corpus_->corpus, c, enc,
                 corpus_->vocab, {&toy, &corpus_->images}, initial);
  EXPECT_EQ(a.params, b.params);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].loss.total, b.steps[i].loss.total);
  }
  c.seed = 14;
  auto d = Train(corpus_->train_pairs, corpus_->queries, corpus_->corpus, c, enc,
                 corpus_->vocab, {&toy, &corpus_->images}, initial);
  EXPECT_NE(a.params, d.params);
}

TEST_F(TrainTest, LossDecreasesOnSeparableData) {
  auto run = testing::TrainOnSynthetic(*corpus_, *options_, Variant::kM2,
                                       testing::ToyTrainingConfig());
  ASSERT_EQ(run.training.epochs.size(), 5u);
  EXPECT_LT(run.training.epochs.back().mean_infonce,
            run.training.epochs.front().mean_infonce);
}

TEST_F(TrainTest, UnknownIdsAreDataErrors) {
  EncoderConfig enc{Variant::kM2, Fusion::kSum, std::nullopt};
  ToyEmbeddingProvider toy(options_->dim, options_->seed);
  auto initial = InitParams(enc, corpus_->vocab.size(), options_->dim,
                            options_->dim, 5);
  std::vector<TrainingPair> bad = {{"q0000", "d9999"}};
  EXPECT_THROW(Train(bad, corpus_->queries, corpus_->corpus, TrainingConfig{}, enc,
                     corpus_->vocab, {&toy, &corpus_->images}, initial),
               DataError);
}

TEST(InitParamsTest, ShapesAndBounds) {
  auto p = InitParams({Variant::kM2, Fusion::kSum, std::nullopt}, 30, 16, 9, 1);
  ASSERT_TRUE(p.mlp && p.doc_mlm);
  EXPECT_FALSE(p.query_mlm.has_value());
  EXPECT_EQ(p.mlp->W.size(), 16u);
  EXPECT_EQ(p.doc_mlm->dim, 9u);
  EXPECT_EQ(p.doc_mlm->vocab_size(), 30u);
  for (double w : p.mlp->W) EXPECT_LE(std::abs(w), 0.25);
  for (double b : p.doc_mlm->bias) EXPECT_EQ(b, 0.0);
  auto m1 = InitParams({Variant::kM1, Fusion::kSum, std::nullopt}, 30, 16, 9, 1);
  EXPECT_TRUE(m1.query_mlm && m1.doc_mlm && !m1.mlp);
  auto m3 = InitParams({Variant::kM3, Fusion::kSum, std::nullopt}, 30, 16, 0, 1);
  EXPECT_TRUE(m3.mlp && !m3.doc_mlm && !m3.query_mlm);
}

TEST(LoadTrainingPairsTest, ParsesTsvAndReportsBadLine) {
  testing::TempDir dir;
  testing::WriteFile(dir / "p.tsv", "q1\td1\nq2\td2\n");
  auto pairs = LoadTrainingPairs(dir / "p.tsv");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[1].doc_id, "d2");
  testing::WriteFile(dir / "bad.tsv", "q1\td1\nq2 d2\n");
  try {
    LoadTrainingPairs(dir / "bad.tsv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace mmlsr
