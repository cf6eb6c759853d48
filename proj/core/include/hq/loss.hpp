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

#include <cstdint>
#include <span>
#include <vector>

#include "hq/encoder.hpp"
#include "hq/feature_store.hpp"
#include "hq/quantizer.hpp"

namespace hq {

/// Weights of the similarity, hash, balance and quantization terms.
struct LossWeights {
  double sim = 50.0;
  double hash = 0.01;
  double balance = 0.01;
  double quant = 0.0001;

  void Validate() const;
};

/// log(1 + e^z) - s z, evaluated without overflow.
double SimLossFromDot(double z, int similar);
double SimLoss(std::span<const double> f_i, std::span<const double> f_j,
               int similar);
/// sum_d (f_d - sgn(f_d))^2 with sgn(0) = +1.
double HashLoss(std::span<const double> f);
/// (sum_d f_d)^2.
double BalanceLoss(std::span<const double> f);
/// ||f - sum_l C^l b^l||^2.
double QuantLossTerm(std::span<const double> f, const QuantizerModel& model,
                     std::span<const std::uint16_t> indices);

/// Everything the batch loss needs besides the pairs themselves.
struct LossContext {
  const DenseFeatureMatrix& inputs_a;
  const DenseFeatureMatrix& inputs_b;
  const EncoderParams& encoder_a;
  const EncoderParams& encoder_b;
  const QuantizerModel& quantizer;
  const IndicatorSet& indicators_a;
  const IndicatorSet& indicators_b;
  LossWeights weights;
};

/// Unweighted per-term sums plus the weighted total.
struct LossBreakdown {
  double sim = 0.0;
  double hash = 0.0;
  double balance = 0.0;
  double quant = 0.0;
  double total = 0.0;
};

/// Sum over pairs (i, j) of the weighted four-term loss; the hash, balance
/// and quantization terms count both f_i and f_j of every pair.
LossBreakdown TotalLoss(std::span<const TrainingPair> batch,
                        const LossContext& ctx);

/// Gradient buffers shaped like the encoders they belong to.
struct EncoderGradients {
  EncoderParams a;
  EncoderParams b;
};

EncoderGradients ZeroGradients(const EncoderParams& a, const EncoderParams& b);

/// Analytic gradient of TotalLoss with sgn(f) and the indicators held
/// fixed; returns the loss evaluated on the way.
LossBreakdown LossGradients(std::span<const TrainingPair> batch,
                            const LossContext& ctx, EncoderGradients& grads);

}  // namespace hq
