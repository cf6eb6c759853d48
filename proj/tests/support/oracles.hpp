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

// Slow, literal reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "hq/encoder.hpp"
#include "hq/feature_store.hpp"
#include "hq/hash_codec.hpp"
#include "hq/quantizer.hpp"
#include "hq/retrieval.hpp"

namespace hq::oracle {

inline DenseFeatureMatrix RandomMatrix(std::size_t count, std::size_t dim,
                                       std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<float> v(count * dim);
  for (auto& x : v) x = static_cast<float>(g(rng));
  return DenseFeatureMatrix(count, dim, std::move(v));
}

inline QuantizerModel RandomQuantizer(std::size_t m, std::size_t k, std::size_t n,
                                      std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<float> v(m * k * n);
  for (auto& x : v) x = static_cast<float>(g(rng));
  return QuantizerModel(m, k, n, std::move(v));
}

inline IndicatorSet RandomIndicators(std::size_t count, std::size_t m, std::size_t k,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, static_cast<int>(k) - 1);
  std::vector<std::uint16_t> v(count * m);
  for (auto& x : v) x = static_cast<std::uint16_t>(u(rng));
  return IndicatorSet(count, m, k, std::move(v));
}

/// Bit d of code i, read one bit at a time.
inline bool Bit(CodeView code, std::size_t d) {
  return (code[d / 64] >> (d % 64)) & 1u;
}

inline std::size_t NaiveHamming(CodeView x, CodeView y, std::size_t dim) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < dim; ++i) d += Bit(x, i) != Bit(y, i);
  return d;
}

/// Every item sorted by (distance, index), then truncated.
inline std::vector<HammingCandidate> SortAllCandidates(CodeView q,
                                                       const PackedHashCodes& db,
                                                       std::size_t candidates) {
  std::vector<HammingCandidate> all;
  for (std::size_t i = 0; i < db.count(); ++i) {
    all.push_back({static_cast<std::uint32_t>(i),
                   static_cast<std::uint32_t>(NaiveHamming(q, db.code(i), db.dim()))});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });
  all.resize(candidates);
  return all;
}

inline double Dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

inline std::vector<double> NaiveReconstruct(const QuantizerModel& q,
                                            std::span<const std::uint16_t> idx) {
  std::vector<double> r(q.dim(), 0.0);
  for (std::size_t l = 0; l < q.num_books(); ++l) {
    const auto& cb = q.codebooks();
    for (std::size_t d = 0; d < q.dim(); ++d) {
      r[d] += cb[(l * q.book_size() + idx[l]) * q.dim() + d];
    }
  }
  return r;
}

inline double SquaredResidual(std::span<const float> f, const QuantizerModel& q,
                              std::span<const std::uint16_t> idx) {
  const auto r = NaiveReconstruct(q, idx);
  double s = 0.0;
  for (std::size_t d = 0; d < f.size(); ++d) s += (f[d] - r[d]) * (f[d] - r[d]);
  return s;
}

inline double NaiveObjective(const DenseFeatureMatrix& f, const QuantizerModel& q,
                             const IndicatorSet& ind) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.count(); ++i) s += SquaredResidual(f.row(i), q, ind.item(i));
  return s;
}

/// Best joint assignment over all k^m index tuples.
inline double ExhaustiveBest(std::span<const float> f, const QuantizerModel& q,
                             std::vector<std::uint16_t>* argmin = nullptr) {
  const std::size_t m = q.num_books(), k = q.book_size();
  std::vector<std::uint16_t> idx(m, 0);
  double best = INFINITY;
  while (true) {
    const double v = SquaredResidual(f, q, idx);
    if (v < best) {
      best = v;
      if (argmin) *argmin = idx;
    }
    std::size_t l = 0;
    while (l < m && ++idx[l] == k) idx[l++] = 0;
    if (l == m) break;
  }
  return best;
}

/// Direct, loop-per-element forward pass.
inline std::vector<double> SlowForward(const EncoderParams& p, std::span<const double> x) {
  std::vector<double> cur(x.begin(), x.end());
  for (const auto& layer : p.layers) {
    std::vector<double> next(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      double acc = layer.bias[r];
      for (std::size_t c = 0; c < layer.in; ++c) acc += layer.weights[r * layer.in + c] * cur[c];
      next[r] = std::tanh(acc);
    }
    cur = std::move(next);
  }
  return cur;
}

inline std::vector<double> ToDouble(std::span<const float> v) {
  return {v.begin(), v.end()};
}

inline RankedResult SortScores(std::vector<ScoredItem> all, std::size_t top_k) {
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.index < b.index;
  });
  all.resize(std::min(top_k, all.size()));
  return {all};
}

/// AQD of one item computed straight from the codebooks, summed per book in
/// book order the same way the table accumulates.
inline double DirectAqd(std::span<const float> q, const QuantizerModel& model,
                        std::span<const std::uint16_t> idx) {
  double s = 0.0;
  for (std::size_t l = 0; l < model.num_books(); ++l) s += Dot(q, model.column(l, idx[l]));
  return s;
}

/// Two-stage ranking by full sorts at both stages.
inline RankedResult BruteTwoStage(std::span<const float> q, const RetrievalIndex& index,
                                  std::size_t candidates, std::size_t top_k) {
  std::vector<std::uint64_t> code(WordsForBits(q.size()));
  for (std::size_t d = 0; d < q.size(); ++d) {
    if (q[d] >= 0.0f) code[d / 64] |= std::uint64_t{1} << (d % 64);
  }
  const auto cand = SortAllCandidates(code, index.hash_codes(), candidates);
  std::vector<ScoredItem> scored;
  for (const auto& c : cand) {
    scored.push_back({c.index, DirectAqd(q, index.quantizer(), index.indicators().item(c.index))});
  }
  return SortScores(std::move(scored), top_k);
}

/// AP@R straight from its definition: precision at every relevant rank.
inline double LiteralAp(std::span<const std::uint32_t> ranked,
                        const std::vector<std::uint8_t>& relevant, std::size_t cutoff) {
  const std::size_t total = std::count(relevant.begin(), relevant.end(), 1);
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t r = 1; r <= std::min(cutoff, ranked.size()); ++r) {
    if (!relevant[ranked[r - 1]]) continue;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < r; ++t) hits += relevant[ranked[t]];
    sum += double(hits) / double(r);
  }
  return sum / double(std::min(total, cutoff));
}

}  // namespace hq::oracle
