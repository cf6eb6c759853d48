// Copyright 2026 The HQ Retrieval Authors.
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

#include <gtest/gtest.h>

#include <random>

#include "error_code.hpp"
#include "hq/trainer.hpp"
#include "oracles.hpp"

namespace hq {
namespace {

using testing::CodeOf;

struct Data {
  SyntheticDataset set;
  PairBatch pairs;
};

Data TwoClusters() {
  auto set = SynthDataset(2, 20, 8, 0.3, 5);
  auto pairs = GeneratePairs(set.labels, set.labels, 3, 0.5);
  return {std::move(set), std::move(pairs)};
}

TrainConfig Small() {
  TrainConfig c;
  c.epochs = 50;
  c.batch_size = 16;
  c.learning_rate = 1e-3;
  c.alternations = 2;
  c.num_books = 2;
  c.book_size = 4;
  c.seed = 9;
  return c;
}

TEST(TrainConfig, Validation) {
  auto c = Small();
  c.batch_size = 0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kConfigError);
  c = Small();
  c.learning_rate = 0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kConfigError);
  c = Small();
  c.depth = 3;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kConfigError);
  c = Small();
  c.epochs = 0;
  EXPECT_NO_THROW(c.Validate());
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  const auto d = TwoClusters();
  auto c = Small();
  c.epochs = 0;
  const auto r = Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {});
  EXPECT_EQ(r.encoder_a, InitEncoder(Modality::kA, 8, 8, 1, c.seed));
  EXPECT_EQ(r.encoder_b, InitEncoder(Modality::kB, 8, 8, 1, c.seed));
  const auto fa = EncodeMatrix(r.encoder_a, d.set.modality_a);
  const auto fb = EncodeMatrix(r.encoder_b, d.set.modality_b);
  const auto fit = LearnQuantizer(fa, fb, 2, 4, c.alternations, c.seed);
  EXPECT_EQ(r.quantizer, fit.model);
  EXPECT_EQ(r.indicators_a, fit.indicators_a);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.history[0].epoch, 0u);
}

TEST(Train, LossDecreasesOnTwoClusters) {
  const auto d = TwoClusters();
  const auto r = Train(d.set.modality_a, d.set.modality_b, d.pairs, Small(), {});
  ASSERT_EQ(r.history.size(), 51u);
  EXPECT_LT(r.history.back().loss.total, r.history.front().loss.total);
}

TEST(Train, BitwiseDeterministic) {
  const auto d = TwoClusters();
  auto c = Small();
  c.epochs = 5;
  c.depth = 2;
  const auto x = Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {});
  const auto y = Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {});
  EXPECT_EQ(EncodeEncoder(x.encoder_a), EncodeEncoder(y.encoder_a));
  EXPECT_EQ(EncodeEncoder(x.encoder_b), EncodeEncoder(y.encoder_b));
  EXPECT_EQ(x.quantizer, y.quantizer);
  EXPECT_EQ(x.indicators_b, y.indicators_b);
  c.seed = 10;
  EXPECT_NE(Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {}).encoder_a, x.encoder_a);
}

TEST(Train, OneFullBatchEpochIsOneMeanGradientStep) {
  const auto d = TwoClusters();
  auto c = Small();
  c.epochs = 1;
  c.batch_size = d.pairs.pairs.size();
  c.learning_rate = 0.05;
  const LossWeights w{1.0, 0.1, 0.1, 0.1};
  auto init = c;
  init.epochs = 0;
  const auto start = Train(d.set.modality_a, d.set.modality_b, d.pairs, init, w);
  const auto after = Train(d.set.modality_a, d.set.modality_b, d.pairs, c, w);

  const LossContext ctx{d.set.modality_a,   d.set.modality_b,   start.encoder_a,
                        start.encoder_b,    start.quantizer,    start.indicators_a,
                        start.indicators_b, w};
  auto g = ZeroGradients(start.encoder_a, start.encoder_b);
  LossGradients(d.pairs.pairs, ctx, g);
  const double scale = c.learning_rate / static_cast<double>(d.pairs.pairs.size());
  const auto& l0 = start.encoder_a.layers[0];
  for (std::size_t i = 0; i < l0.weights.size(); ++i) {
    EXPECT_NEAR(after.encoder_a.layers[0].weights[i], l0.weights[i] - scale * g.a.layers[0].weights[i],
                1e-12);
  }
  for (std::size_t i = 0; i < l0.bias.size(); ++i) {
    EXPECT_NEAR(after.encoder_b.layers[0].bias[i],
                start.encoder_b.layers[0].bias[i] - scale * g.b.layers[0].bias[i], 1e-12);
  }
}

TEST(Train, HistoryTracksReturnedState) {
  const auto d = TwoClusters();
  auto c = Small();
  c.epochs = 3;
  const auto r = Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {});
  const auto fa = EncodeMatrix(r.encoder_a, d.set.modality_a);
  const auto fb = EncodeMatrix(r.encoder_b, d.set.modality_b);
  EXPECT_NEAR(r.history.back().quant_objective,
              QuantizationObjective(fa, r.quantizer, r.indicators_a) +
                  QuantizationObjective(fb, r.quantizer, r.indicators_b),
              1e-9);
  const LossContext ctx{d.set.modality_a, d.set.modality_b, r.encoder_a, r.encoder_b,
                        r.quantizer,      r.indicators_a,   r.indicators_b, {}};
  EXPECT_DOUBLE_EQ(r.history.back().loss.total, TotalLoss(d.pairs.pairs, ctx).total);
  for (std::size_t e = 0; e < r.history.size(); ++e) EXPECT_EQ(r.history[e].epoch, e);
}

TEST(Train, CodeDimOverride) {
  const auto d = TwoClusters();
  auto c = Small();
  c.epochs = 1;
  c.code_dim = 5;
  const auto r = Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {});
  EXPECT_EQ(r.encoder_a.output_dim(), 5u);
  EXPECT_EQ(r.quantizer.dim(), 5u);
}

TEST(Train, Errors) {
  const auto d = TwoClusters();
  PairBatch empty;
  EXPECT_EQ(CodeOf([&] { Train(d.set.modality_a, d.set.modality_b, empty, Small(), {}); }),
            ErrorCode::kInvalidArgument);
  auto c = Small();
  c.book_size = 128;  // more entries than the 80 stacked rows
  EXPECT_EQ(CodeOf([&] { Train(d.set.modality_a, d.set.modality_b, d.pairs, c, {}); }),
            ErrorCode::kNotEnoughItems);
}

}  // namespace
}  // namespace hq
