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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hq/encoder.hpp"
#include "hq/feature_store.hpp"
#include "hq/loss.hpp"
#include "hq/quantizer.hpp"

namespace hq {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  /// Quantizer (update, assign) alternations after every epoch.
  std::size_t alternations = 10;
  std::uint64_t seed = 1;
  std::size_t depth = 1;
  /// Output feature / hash code length n; 0 means modality A's input dim.
  std::size_t code_dim = 0;
  std::size_t num_books = 4;
  std::size_t book_size = 256;
  QuantizerOptions quantizer;

  void Validate() const;
};

struct EpochRecord {
  std::size_t epoch;  // 0 is the initial state
  LossBreakdown loss;
  double quant_objective;
};

struct TrainResult {
  EncoderParams encoder_a;
  EncoderParams encoder_b;
  QuantizerModel quantizer;
  IndicatorSet indicators_a;
  IndicatorSet indicators_b;
  std::vector<EpochRecord> history;
};

/// Minibatch SGD on both encoders (step = learning_rate * batch-mean
/// gradient), re-encoding the training set after every epoch and refining
/// the quantizer with warm-started alternations. Deterministic in `seed`.
TrainResult Train(const DenseFeatureMatrix& inputs_a,
                  const DenseFeatureMatrix& inputs_b, const PairBatch& pairs,
                  const TrainConfig& config, const LossWeights& weights);

}  // namespace hq
