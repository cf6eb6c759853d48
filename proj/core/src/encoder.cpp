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

#include "hq/encoder.hpp"

#include <cmath>
#include <random>

#include "hq/binary_io.hpp"
#include "hq/error.hpp"

namespace hq {
namespace {

constexpr char kEncoderMagic[] = "ENC1";

DenseLayer InitLayer(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out)};
  for (auto& w : layer.weights) w = dist(rng);
  for (auto& b : layer.bias) b = dist(rng);
  return layer;
}

void ApplyLayer(const DenseLayer& layer, std::span<const double> x,
                std::vector<double>& y) {
  y.resize(layer.out);
  for (std::size_t r = 0; r < layer.out; ++r) {
    double acc = layer.bias[r];
    const double* row = layer.weights.data() + r * layer.in;
    for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * x[c];
    y[r] = std::tanh(acc);
  }
}

}  // namespace

void ValidateEncoder(const EncoderParams& params) {
  Require(params.layers.size() == 1 || params.layers.size() == 2,
          ErrorCode::kInvalidArgument, "encoder depth must be 1 or 2");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Require(layer.in >= 1 && layer.out >= 1 &&
                layer.weights.size() == layer.in * layer.out &&
                layer.bias.size() == layer.out,
            ErrorCode::kInvalidArgument, "encoder layer shape mismatch");
    if (l > 0) {
      Require(params.layers[l - 1].out == layer.in, ErrorCode::kInvalidArgument,
              "encoder layers do not chain");
    }
    for (double v : layer.weights) {
      if (!std::isfinite(v)) Throw(ErrorCode::kNonFiniteValue, "encoder weight");
    }
    for (double v : layer.bias) {
      if (!std::isfinite(v)) Throw(ErrorCode::kNonFiniteValue, "encoder bias");
    }
  }
}

EncoderParams InitEncoder(Modality modality, std::size_t input_dim,
                          std::size_t output_dim, std::size_t depth,
                          std::uint64_t seed) {
  Require(depth == 1 || depth == 2, ErrorCode::kInvalidArgument,
          "encoder depth must be 1 or 2");
  Require(input_dim >= 1 && output_dim >= 1, ErrorCode::kInvalidArgument,
          "encoder dims must be positive");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(modality)};
  std::mt19937_64 rng(seq);
  EncoderParams params{modality, {}};
  if (depth == 2) {
    params.layers.push_back(InitLayer(input_dim, output_dim, rng));
    params.layers.push_back(InitLayer(output_dim, output_dim, rng));
  } else {
    params.layers.push_back(InitLayer(input_dim, output_dim, rng));
  }
  return params;
}

ForwardTrace EncoderForwardTrace(const EncoderParams& params,
                                 std::span<const double> input) {
  Require(!params.layers.empty() && input.size() == params.input_dim(),
          ErrorCode::kDimMismatch, "encoder input dim mismatch");
  ForwardTrace trace;
  trace.activations.resize(params.layers.size());
  std::span<const double> x = input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    ApplyLayer(params.layers[l], x, trace.activations[l]);
    x = trace.activations[l];
  }
  return trace;
}

std::vector<double> EncoderForward(const EncoderParams& params,
                                   std::span<const double> input) {
  return std::move(EncoderForwardTrace(params, input).activations.back());
}

std::vector<double> EncoderForward(const EncoderParams& params,
                                   std::span<const float> input) {
  std::vector<double> x(input.begin(), input.end());
  return EncoderForward(params, x);
}

DenseFeatureMatrix EncodeMatrix(const EncoderParams& params,
                                const DenseFeatureMatrix& inputs) {
  Require(inputs.dim() == params.input_dim(), ErrorCode::kDimMismatch,
          "feature dim differs from encoder input dim");
  const std::size_t n = params.output_dim();
  std::vector<float> out(inputs.count() * n);
  for (std::size_t i = 0; i < inputs.count(); ++i) {
    const auto f = EncoderForward(params, inputs.row(i));
    for (std::size_t d = 0; d < n; ++d) out[i * n + d] = static_cast<float>(f[d]);
  }
  return DenseFeatureMatrix(inputs.count(), n, std::move(out));
}

std::vector<std::uint8_t> EncodeEncoder(const EncoderParams& params) {
  ValidateEncoder(params);
  io::ByteWriter w;
  w.Magic(kEncoderMagic);
  w.U32(static_cast<std::uint32_t>(params.modality));
  w.U32(static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    w.U32(static_cast<std::uint32_t>(layer.out));
    w.U32(static_cast<std::uint32_t>(layer.in));
    for (double v : layer.weights) w.F64(v);
    for (double v : layer.bias) w.F64(v);
  }
  return w.bytes();
}

EncoderParams DecodeEncoder(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.ExpectMagic(kEncoderMagic);
  EncoderParams params;
  const std::uint32_t modality = r.U32();
  Require(modality <= 1, ErrorCode::kInvalidArgument, "unknown modality tag");
  params.modality = static_cast<Modality>(modality);
  const std::uint32_t depth = r.U32();
  Require(depth == 1 || depth == 2, ErrorCode::kInvalidArgument,
          "encoder depth must be 1 or 2");
  for (std::uint32_t l = 0; l < depth; ++l) {
    DenseLayer layer;
    layer.out = r.U32();
    layer.in = r.U32();
    r.Need((layer.out * layer.in + layer.out) * sizeof(double), "encoder layer");
    layer.weights.resize(layer.out * layer.in);
    layer.bias.resize(layer.out);
    for (auto& v : layer.weights) v = r.F64();
    for (auto& v : layer.bias) v = r.F64();
    params.layers.push_back(std::move(layer));
  }
  ValidateEncoder(params);
  return params;
}

void SaveEncoder(const EncoderParams& params, const std::filesystem::path& path) {
  io::WriteFile(path, EncodeEncoder(params));
}

EncoderParams LoadEncoder(const std::filesystem::path& path) {
  return DecodeEncoder(io::ReadFile(path));
}

}  // namespace hq
