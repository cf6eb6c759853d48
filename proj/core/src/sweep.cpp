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

#include "hq/sweep.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "hq/error.hpp"

namespace hq {
namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> Ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

RetrievalIndex RandomIndex(std::size_t count, std::size_t dim, std::size_t m,
                           std::size_t k, const PackedHashCodes& codes,
                           std::mt19937_64& rng) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<float> books(m * k * dim);
  for (auto& v : books) v = gauss(rng);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k - 1));
  std::vector<std::uint16_t> ind(count * m);
  for (auto& v : ind) v = static_cast<std::uint16_t>(pick(rng));
  return RetrievalIndex(codes, QuantizerModel(m, k, dim, std::move(books)),
                        IndicatorSet(count, m, k, std::move(ind)));
}

PackedHashCodes RandomCodes(std::size_t count, std::size_t dim, std::mt19937_64& rng) {
  const std::size_t wpc = WordsForBits(dim);
  const std::uint64_t last_mask =
      dim % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (dim % 64)) - 1;
  std::vector<std::uint64_t> words(count * wpc);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t w = 0; w < wpc; ++w) words[i * wpc + w] = rng();
    words[i * wpc + wpc - 1] &= last_mask;
  }
  return PackedHashCodes(count, dim, std::move(words));
}

}  // namespace

double MedianSeconds(const std::function<void()>& body, std::size_t repetitions) {
  Require(repetitions >= 1, ErrorCode::kInvalidArgument, "need >= 1 repetition");
  body();
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    body();
    samples.push_back(std::chrono::duration<double>(Clock::now() - start).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

std::size_t CandidatesForAlpha(double alpha, std::size_t count) {
  Require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument,
          "alpha must lie in [0, 1]");
  const auto c = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(count)));
  return std::clamp<std::size_t>(c, 1, count);
}

std::vector<AlphaPoint> SweepAlpha(const RetrievalTask& i2t,
                                   const RetrievalTask& t2i,
                                   std::span<const double> alphas,
                                   std::size_t cutoff, std::size_t repetitions) {
  std::vector<AlphaPoint> out;
  for (double alpha : alphas) {
    Require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument,
            "alpha must lie in [0, 1]");
    const bool hash_only = alpha == 0.0;
    const QueryMode mode = hash_only ? QueryMode::kHashOnly : QueryMode::kTwoStage;
    const std::size_t c_i2t = hash_only ? 0 : CandidatesForAlpha(alpha, i2t.index.count());
    const std::size_t c_t2i = hash_only ? 0 : CandidatesForAlpha(alpha, t2i.index.count());

    AlphaPoint point{alpha, c_i2t, MapAt(i2t, mode, c_i2t, cutoff).map,
                     MapAt(t2i, mode, c_t2i, cutoff).map, 0.0};

    auto timed = [&](const RetrievalTask& task, std::size_t candidates) {
      const std::size_t top_k = std::min(cutoff, task.index.count());
      const double total = MedianSeconds(
          [&] {
            for (std::size_t q = 0; q < task.queries.count(); ++q) {
              volatile auto size = RunQuery(task, q, mode, candidates, top_k).items.size();
              (void)size;
            }
          },
          repetitions);
      return total / static_cast<double>(task.queries.count());
    };
    point.seconds_per_query = 0.5 * (timed(i2t, c_i2t) + timed(t2i, c_t2i));
    out.push_back(point);
  }
  return out;
}

QuantOnlyShape MatchMemoryBudget(std::uint64_t count, std::uint64_t dim,
                                 std::uint64_t budget_bits,
                                 std::uint64_t preferred_book_size,
                                 double tolerance) {
  Require(std::has_single_bit(preferred_book_size), ErrorCode::kKNotPowerOfTwo,
          "preferred book size must be a power of two");
  const int preferred_log = std::countr_zero(preferred_book_size);
  std::vector<int> logs;
  for (int p = 1; p <= 16; ++p) logs.push_back(p);
  std::stable_sort(logs.begin(), logs.end(), [&](int a, int b) {
    return std::abs(a - preferred_log) < std::abs(b - preferred_log);
  });
  const double budget = static_cast<double>(budget_bits);
  for (int p : logs) {
    const std::uint64_t k = std::uint64_t{1} << p;
    const double per_book = static_cast<double>(
        MemoryFootprintBits({count, dim, 1, k, 0}, ModelVariant::kQuantization));
    const auto lo = static_cast<std::uint64_t>(std::floor(budget / per_book));
    std::optional<QuantOnlyShape> best;
    double best_gap = 0.0;
    for (std::uint64_t m : {lo, lo + 1}) {
      if (m == 0) continue;
      const std::uint64_t bits =
          MemoryFootprintBits({count, dim, m, k, 0}, ModelVariant::kQuantization);
      const double gap = std::abs(static_cast<double>(bits) - budget);
      if (!best || gap < best_gap) {
        best = QuantOnlyShape{m, k, bits};
        best_gap = gap;
      }
    }
    if (best && best_gap <= tolerance * budget) return *best;
  }
  Throw(ErrorCode::kInfeasibleBudget,
        "no quantization-only (m, k) matches the memory budget");
}

std::vector<NSweepPoint> SweepN(const NSweepOptions& opt) {
  Require(opt.top_k <= opt.candidates && opt.candidates <= opt.count,
          ErrorCode::kInvalidArgument, "need top_k <= candidates <= N");
  std::vector<NSweepPoint> out;
  std::mt19937_64 rng(opt.seed);
  for (std::size_t dim : opt.dims) {
    const CostModel hq_cost{opt.count, dim, opt.num_books, opt.book_size, opt.candidates};
    const std::uint64_t hq_bits = MemoryFootprintBits(hq_cost, ModelVariant::kHashQuant);
    const auto shape = MatchMemoryBudget(opt.count, dim, hq_bits,
        opt.quant_book_size == 0 ? opt.book_size : opt.quant_book_size, opt.tolerance);

    const auto codes = RandomCodes(opt.count, dim, rng);
    const auto hq_index = RandomIndex(opt.count, dim, opt.num_books, opt.book_size, codes, rng);
    const auto q_index = RandomIndex(opt.count, dim, shape.num_books, shape.book_size, codes, rng);

    std::normal_distribution<float> gauss(0.0f, 1.0f);
    std::vector<float> queries(opt.queries * dim);
    for (auto& v : queries) v = gauss(rng);
    auto query = [&](std::size_t q) {
      return std::span<const float>(queries.data() + q * dim, dim);
    };

    const double hq_total = MedianSeconds(
        [&] {
          for (std::size_t q = 0; q < opt.queries; ++q) {
            volatile auto s = TwoStageQuery(query(q), hq_index, opt.candidates, opt.top_k).items.size();
            (void)s;
          }
        },
        opt.repetitions);
    const double q_total = MedianSeconds(
        [&] {
          for (std::size_t q = 0; q < opt.queries; ++q) {
            volatile auto s = FullAqdQuery(query(q), q_index, opt.top_k).items.size();
            (void)s;
          }
        },
        opt.repetitions);

    const CostModel q_cost{opt.count, dim, shape.num_books, shape.book_size, 0};
    NSweepPoint point{dim,
                      hq_bits,
                      shape,
                      hq_total / static_cast<double>(opt.queries),
                      q_total / static_cast<double>(opt.queries),
                      0.0,
                      static_cast<double>(OpCount(q_cost, ModelVariant::kQuantization)) /
                          static_cast<double>(OpCount(hq_cost, ModelVariant::kHashQuant))};
    point.ratio = point.quant_seconds / point.hq_seconds;
    out.push_back(point);
  }
  return out;
}

double SpearmanCorrelation(std::span<const double> x, std::span<const double> y) {
  Require(x.size() == y.size() && x.size() >= 2, ErrorCode::kInvalidArgument,
          "Spearman needs two equal-length samples of size >= 2");
  const auto rx = Ranks(x);
  const auto ry = Ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace hq
