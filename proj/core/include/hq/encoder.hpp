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
#include <filesystem>
#include <span>
#include <vector>

#include "hq/feature_store.hpp"

namespace hq {

enum class Modality : std::uint32_t { kA = 0, kB = 1 };

/// Affine map y = W x + c with W stored row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(std::size_t r, std::size_t c) { return weights[r * in + c]; }
  double w(std::size_t r, std::size_t c) const { return weights[r * in + c]; }

  bool operator==(const DenseLayer&) const = default;
};

/// Shallow per-modality encoder: one or two affine layers, each followed
/// by tanh, so every output lies in (-1, 1).
struct EncoderParams {
  Modality modality = Modality::kA;
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().in; }
  std::size_t output_dim() const { return layers.back().out; }
  std::size_t depth() const { return layers.size(); }

  bool operator==(const EncoderParams&) const = default;
};

/// Throws InvalidArgument on bad shapes and NonFiniteValue on NaN/Inf.
void ValidateEncoder(const EncoderParams& params);

/// Weights and biases drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
/// The hidden layer of a depth-2 encoder has `output_dim` units.
EncoderParams InitEncoder(Modality modality, std::size_t input_dim,
                          std::size_t output_dim, std::size_t depth,
                          std::uint64_t seed);

/// Post-activation values of every layer for one input.
struct ForwardTrace {
  std::vector<std::vector<double>> activations;

  std::span<const double> output() const { return activations.back(); }
};

ForwardTrace EncoderForwardTrace(const EncoderParams& params,
                                 std::span<const double> input);

std::vector<double> EncoderForward(const EncoderParams& params,
                                   std::span<const double> input);
std::vector<double> EncoderForward(const EncoderParams& params,
                                   std::span<const float> input);

/// Encodes every row; the result is rounded to 32-bit features.
DenseFeatureMatrix EncodeMatrix(const EncoderParams& params,
                                const DenseFeatureMatrix& inputs);

/// "ENC1" | u32 modality | u32 depth | per layer: u32 out, u32 in,
/// out*in f64 weights, out f64 biases (all little-endian).
std::vector<std::uint8_t> EncodeEncoder(const EncoderParams& params);
EncoderParams DecodeEncoder(std::span<const std::uint8_t> bytes);
void SaveEncoder(const EncoderParams& params, const std::filesystem::path& path);
EncoderParams LoadEncoder(const std::filesystem::path& path);

}  // namespace hq
