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

#include "hq/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "hq/error.hpp"

namespace hq {
namespace {

void Step(EncoderParams& params, const EncoderParams& grad, double scale) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& p = params.layers[l];
    const auto& g = grad.layers[l];
    for (std::size_t i = 0; i < p.weights.size(); ++i) p.weights[i] -= scale * g.weights[i];
    for (std::size_t i = 0; i < p.bias.size(); ++i) p.bias[i] -= scale * g.bias[i];
  }
}

EpochRecord Measure(std::size_t epoch, const DenseFeatureMatrix& inputs_a,
                    const DenseFeatureMatrix& inputs_b, const PairBatch& pairs,
                    const TrainResult& state, const DenseFeatureMatrix& fa,
                    const DenseFeatureMatrix& fb, const LossWeights& weights) {
  const LossContext ctx{inputs_a,           inputs_b,           state.encoder_a,
                        state.encoder_b,    state.quantizer,    state.indicators_a,
                        state.indicators_b, weights};
  const double qobj = QuantizationObjective(fa, state.quantizer, state.indicators_a) +
                      QuantizationObjective(fb, state.quantizer, state.indicators_b);
  return {epoch, TotalLoss(pairs.pairs, ctx), qobj};
}

}  // namespace

void TrainConfig::Validate() const {
  Require(batch_size >= 1, ErrorCode::kConfigError, "batch_size must be >= 1");
  Require(learning_rate > 0.0, ErrorCode::kConfigError, "learning_rate must be > 0");
  Require(depth == 1 || depth == 2, ErrorCode::kConfigError, "depth must be 1 or 2");
  Require(num_books >= 1, ErrorCode::kConfigError, "m must be >= 1");
  Require(book_size >= 1 && book_size <= 65536, ErrorCode::kConfigError,
          "k must be in [1, 65536]");
}

TrainResult Train(const DenseFeatureMatrix& inputs_a,
                  const DenseFeatureMatrix& inputs_b, const PairBatch& pairs,
                  const TrainConfig& config, const LossWeights& weights) {
  config.Validate();
  weights.Validate();
  Require(!pairs.pairs.empty(), ErrorCode::kInvalidArgument, "no training pairs");
  const std::size_t n = config.code_dim == 0 ? inputs_a.dim() : config.code_dim;

  auto enc_a = InitEncoder(Modality::kA, inputs_a.dim(), n, config.depth, config.seed);
  auto enc_b = InitEncoder(Modality::kB, inputs_b.dim(), n, config.depth, config.seed);
  auto fa = EncodeMatrix(enc_a, inputs_a);
  auto fb = EncodeMatrix(enc_b, inputs_b);
  auto fit = LearnQuantizer(fa, fb, config.num_books, config.book_size,
                            config.alternations, config.seed, config.quantizer);

  TrainResult state{std::move(enc_a),          std::move(enc_b),
                    std::move(fit.model),      std::move(fit.indicators_a),
                    std::move(fit.indicators_b), {}};
  state.history.push_back(Measure(0, inputs_a, inputs_b, pairs, state, fa, fb, weights));

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<TrainingPair> order = pairs.pairs;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const std::span<const TrainingPair> batch(order.data() + start, len);
      const LossContext ctx{inputs_a,           inputs_b,           state.encoder_a,
                            state.encoder_b,    state.quantizer,    state.indicators_a,
                            state.indicators_b, weights};
      auto grads = ZeroGradients(state.encoder_a, state.encoder_b);
      LossGradients(batch, ctx, grads);
      const double scale = config.learning_rate / static_cast<double>(len);
      Step(state.encoder_a, grads.a, scale);
      Step(state.encoder_b, grads.b, scale);
    }
    fa = EncodeMatrix(state.encoder_a, inputs_a);
    fb = EncodeMatrix(state.encoder_b, inputs_b);
    auto refined = RefineQuantizer(fa, fb, state.quantizer, state.indicators_a,
                                   state.indicators_b, config.alternations,
                                   config.quantizer);
    state.quantizer = std::move(refined.model);
    state.indicators_a = std::move(refined.indicators_a);
    state.indicators_b = std::move(refined.indicators_b);
    state.history.push_back(
        Measure(epoch, inputs_a, inputs_b, pairs, state, fa, fb, weights));
  }
  return state;
}

}  // namespace hq
