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
#include <functional>
#include <span>
#include <vector>

#include "hq/cost_model.hpp"
#include "hq/metrics.hpp"
#include "hq/retrieval.hpp"

namespace hq {

/// Median over `repetitions` timed runs of `body`, after one warm-up run.
double MedianSeconds(const std::function<void()>& body, std::size_t repetitions);

struct AlphaPoint {
  double alpha;
  /// 0 for the hash-only endpoint.
  std::size_t candidates;
  double map_i2t;
  double map_t2i;
  /// Median wall-clock seconds per query, averaged over both directions.
  double seconds_per_query;
};

/// alpha = 0 ranks by Hamming distance only; alpha > 0 runs the two-stage
/// query with max(1, round(alpha N)) candidates.
std::vector<AlphaPoint> SweepAlpha(const RetrievalTask& i2t,
                                   const RetrievalTask& t2i,
                                   std::span<const double> alphas,
                                   std::size_t cutoff,
                                   std::size_t repetitions = 5);

std::size_t CandidatesForAlpha(double alpha, std::size_t count);

struct QuantOnlyShape {
  std::uint64_t num_books;
  std::uint64_t book_size;
  std::uint64_t bits;
};

/// Quantization-only (m2, k2) whose footprint matches `budget_bits` within
/// `tolerance`. k2 = `preferred_book_size` is tried first (m2 chosen to
/// minimise the gap); other powers of two are tried in order of distance
/// from it (in log2) only if that fails. Throws InfeasibleBudget.
QuantOnlyShape MatchMemoryBudget(std::uint64_t count, std::uint64_t dim,
                                 std::uint64_t budget_bits,
                                 std::uint64_t preferred_book_size,
                                 double tolerance = 0.05);

struct NSweepOptions {
  std::vector<std::size_t> dims{64, 128, 256, 512};
  std::size_t count = 100000;
  std::size_t candidates = 100;
  std::size_t top_k = 50;
  std::size_t num_books = 4;
  std::size_t book_size = 256;
  /// Preferred quantization-only book size; 0 means `book_size`.
  std::size_t quant_book_size = 0;
  std::size_t queries = 32;
  std::size_t repetitions = 5;
  std::uint64_t seed = 7;
  double tolerance = 0.05;
};

struct NSweepPoint {
  std::size_t dim;
  std::uint64_t hq_bits;
  QuantOnlyShape quant;
  double hq_seconds;
  double quant_seconds;
  /// quant_seconds / hq_seconds
  double ratio;
  /// OpCount(quantization) / OpCount(hq)
  double predicted_ratio;
};

/// Equal-memory timing comparison of the two-stage index against a
/// quantization-only index on random synthetic codes.
std::vector<NSweepPoint> SweepN(const NSweepOptions& options);

/// Spearman rank correlation (average ranks for ties).
double SpearmanCorrelation(std::span<const double> x, std::span<const double> y);

}  // namespace hq
