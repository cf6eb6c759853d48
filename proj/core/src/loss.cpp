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

#include "hq/loss.hpp"

#include <cmath>

#include "hq/error.hpp"
#include "hq/hash_codec.hpp"

namespace hq {
namespace {

double Sign(double v) { return SignBit(v) ? 1.0 : -1.0; }

double Dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) s += x[d] * y[d];
  return s;
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> AsDouble(std::span<const float> x) {
  return {x.begin(), x.end()};
}

struct PairState {
  std::vector<double> input_i, input_j;
  ForwardTrace trace_i, trace_j;
  std::vector<double> recon_i, recon_j;
};

void Forward(const TrainingPair& pair, const LossContext& ctx, PairState& st) {
  Require(pair.index_a < ctx.inputs_a.count() && pair.index_b < ctx.inputs_b.count(),
          ErrorCode::kIndexOutOfRange, "pair index outside feature matrix");
  st.input_i = AsDouble(ctx.inputs_a.row(pair.index_a));
  st.input_j = AsDouble(ctx.inputs_b.row(pair.index_b));
  st.trace_i = EncoderForwardTrace(ctx.encoder_a, st.input_i);
  st.trace_j = EncoderForwardTrace(ctx.encoder_b, st.input_j);
  const std::size_t n = ctx.quantizer.dim();
  st.recon_i.resize(n);
  st.recon_j.resize(n);
  Reconstruct(ctx.quantizer, ctx.indicators_a.item(pair.index_a), st.recon_i);
  Reconstruct(ctx.quantizer, ctx.indicators_b.item(pair.index_b), st.recon_j);
}

void AddTerms(const TrainingPair& pair, const PairState& st, LossBreakdown& out) {
  const auto fi = st.trace_i.output();
  const auto fj = st.trace_j.output();
  out.sim += SimLoss(fi, fj, pair.similar);
  out.hash += HashLoss(fi) + HashLoss(fj);
  out.balance += BalanceLoss(fi) + BalanceLoss(fj);
  double qi = 0.0, qj = 0.0;
  for (std::size_t d = 0; d < fi.size(); ++d) {
    qi += (fi[d] - st.recon_i[d]) * (fi[d] - st.recon_i[d]);
    qj += (fj[d] - st.recon_j[d]) * (fj[d] - st.recon_j[d]);
  }
  out.quant += qi + qj;
}

void Finish(LossBreakdown& out, const LossWeights& w) {
  out.total = w.sim * out.sim + w.hash * out.hash + w.balance * out.balance +
              w.quant * out.quant;
}

// dL/df for one side of a pair, excluding the similarity term.
void OwnTermGradient(std::span<const double> f, std::span<const double> recon,
                     const LossWeights& w, std::vector<double>& g) {
  double sum = 0.0;
  for (double v : f) sum += v;
  for (std::size_t d = 0; d < f.size(); ++d) {
    g[d] += 2.0 * w.hash * (f[d] - Sign(f[d])) + 2.0 * w.balance * sum +
            2.0 * w.quant * (f[d] - recon[d]);
  }
}

// Chains dL/d(output) back through tanh and affine layers.
void Backward(const EncoderParams& params, std::span<const double> input,
              const ForwardTrace& trace, std::vector<double> upstream,
              EncoderParams& grad) {
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& g = grad.layers[l];
    const auto& act = trace.activations[l];
    std::span<const double> x = l == 0 ? input : std::span<const double>(trace.activations[l - 1]);
    std::vector<double> pre(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      pre[r] = upstream[r] * (1.0 - act[r] * act[r]);
    }
    for (std::size_t r = 0; r < layer.out; ++r) {
      g.bias[r] += pre[r];
      double* grow = g.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) grow[c] += pre[r] * x[c];
    }
    if (l == 0) break;
    std::vector<double> down(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* wrow = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) down[c] += wrow[c] * pre[r];
    }
    upstream = std::move(down);
  }
}

void CheckContext(const LossContext& ctx) {
  ctx.weights.Validate();
  Require(ctx.encoder_a.input_dim() == ctx.inputs_a.dim() &&
              ctx.encoder_b.input_dim() == ctx.inputs_b.dim(),
          ErrorCode::kDimMismatch, "encoder input dim differs from features");
  Require(ctx.encoder_a.output_dim() == ctx.quantizer.dim() &&
              ctx.encoder_b.output_dim() == ctx.quantizer.dim(),
          ErrorCode::kDimMismatch, "encoder output dim differs from codebooks");
  Require(ctx.indicators_a.count() == ctx.inputs_a.count() &&
              ctx.indicators_b.count() == ctx.inputs_b.count(),
          ErrorCode::kCountMismatch, "indicator count differs from features");
}

}  // namespace

void LossWeights::Validate() const {
  const bool ok = sim >= 0 && hash >= 0 && balance >= 0 && quant >= 0 &&
                  std::isfinite(sim + hash + balance + quant);
  Require(ok, ErrorCode::kInvalidArgument, "loss weights must be finite and >= 0");
}

double SimLossFromDot(double z, int similar) {
  const double s = static_cast<double>(similar);
  if (z > 0.0) return (1.0 - s) * z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z)) - s * z;
}

double SimLoss(std::span<const double> f_i, std::span<const double> f_j,
               int similar) {
  Require(f_i.size() == f_j.size(), ErrorCode::kDimMismatch,
          "similarity loss on rows of different dims");
  return SimLossFromDot(Dot(f_i, f_j), similar);
}

double HashLoss(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += (v - Sign(v)) * (v - Sign(v));
  return s;
}

double BalanceLoss(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * s;
}

double QuantLossTerm(std::span<const double> f, const QuantizerModel& model,
                     std::span<const std::uint16_t> indices) {
  Require(f.size() == model.dim(), ErrorCode::kDimMismatch,
          "feature dim differs from codebook dim");
  std::vector<double> recon(f.size());
  Reconstruct(model, indices, recon);
  double s = 0.0;
  for (std::size_t d = 0; d < f.size(); ++d) s += (f[d] - recon[d]) * (f[d] - recon[d]);
  return s;
}

LossBreakdown TotalLoss(std::span<const TrainingPair> batch,
                        const LossContext& ctx) {
  CheckContext(ctx);
  LossBreakdown out;
  PairState st;
  for (const auto& pair : batch) {
    Forward(pair, ctx, st);
    AddTerms(pair, st, out);
  }
  Finish(out, ctx.weights);
  return out;
}

EncoderGradients ZeroGradients(const EncoderParams& a, const EncoderParams& b) {
  auto zero = [](EncoderParams p) {
    for (auto& layer : p.layers) {
      std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
      std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    return p;
  };
  return {zero(a), zero(b)};
}

LossBreakdown LossGradients(std::span<const TrainingPair> batch,
                            const LossContext& ctx, EncoderGradients& grads) {
  CheckContext(ctx);
  const LossWeights& w = ctx.weights;
  LossBreakdown out;
  PairState st;
  const std::size_t n = ctx.quantizer.dim();
  std::vector<double> gi(n), gj(n);
  for (const auto& pair : batch) {
    Forward(pair, ctx, st);
    AddTerms(pair, st, out);
    const auto fi = st.trace_i.output();
    const auto fj = st.trace_j.output();
    const double coeff = w.sim * (Sigmoid(Dot(fi, fj)) - pair.similar);
    for (std::size_t d = 0; d < n; ++d) {
      gi[d] = coeff * fj[d];
      gj[d] = coeff * fi[d];
    }
    OwnTermGradient(fi, st.recon_i, w, gi);
    OwnTermGradient(fj, st.recon_j, w, gj);
    Backward(ctx.encoder_a, st.input_i, st.trace_i, gi, grads.a);
    Backward(ctx.encoder_b, st.input_j, st.trace_j, gj, grads.b);
  }
  Finish(out, w);
  return out;
}

}  // namespace hq
