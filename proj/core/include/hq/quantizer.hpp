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
#include <span>
#include <vector>

#include "hq/feature_store.hpp"

namespace hq {

/// m additive codebooks, each an n x k matrix whose columns are dictionary
/// entries. Storage is book-major and column-major within a book, so the
/// column (book, entry) is the contiguous run starting at
/// (book * k + entry) * n.
class QuantizerModel {
 public:
  QuantizerModel(std::size_t num_books, std::size_t book_size, std::size_t dim,
                 std::vector<float> codebooks);

  std::size_t num_books() const { return num_books_; }
  std::size_t book_size() const { return book_size_; }
  std::size_t dim() const { return dim_; }

  std::span<const float> column(std::size_t book, std::size_t entry) const {
    return {codebooks_.data() + (book * book_size_ + entry) * dim_, dim_};
  }
  std::span<const float> codebooks() const { return codebooks_; }

  bool operator==(const QuantizerModel&) const = default;

 private:
  std::size_t num_books_;
  std::size_t book_size_;
  std::size_t dim_;
  std::vector<float> codebooks_;
};

/// Per-item one-of-k choices, one index per book.
class IndicatorSet {
 public:
  IndicatorSet(std::size_t count, std::size_t num_books, std::size_t book_size,
               std::vector<std::uint16_t> indices);

  std::size_t count() const { return count_; }
  std::size_t num_books() const { return num_books_; }
  std::size_t book_size() const { return book_size_; }

  std::span<const std::uint16_t> item(std::size_t i) const {
    return {indices_.data() + i * num_books_, num_books_};
  }
  std::span<const std::uint16_t> indices() const { return indices_; }

  bool operator==(const IndicatorSet&) const = default;

 private:
  std::size_t count_;
  std::size_t num_books_;
  std::size_t book_size_;
  std::vector<std::uint16_t> indices_;
};

/// values[book * k + entry] = <query, column(book, entry)>.
struct AqdLookupTable {
  std::size_t num_books;
  std::size_t book_size;
  std::vector<double> values;

  double at(std::size_t book, std::size_t entry) const {
    return values[book * book_size + entry];
  }
};

struct QuantizerOptions {
  double ridge = 1e-8;
  std::size_t assign_rounds = 3;
};

/// Book 1 takes k distinct feature rows in seeded random order; book l > 1
/// samples k residual rows left after greedy assignment to books < l.
QuantizerModel InitCodebooks(const DenseFeatureMatrix& features,
                             std::size_t num_books, std::size_t book_size,
                             std::uint64_t seed);

/// Coordinate descent over books from a greedy start.
IndicatorSet AssignIndicators(const DenseFeatureMatrix& features,
                              const QuantizerModel& model,
                              std::size_t max_rounds);

/// Coordinate descent warm-started from `prev`; an item's residual never
/// grows relative to its `prev` assignment.
IndicatorSet AssignIndicators(const DenseFeatureMatrix& features,
                              const QuantizerModel& model,
                              const IndicatorSet& prev, std::size_t max_rounds);

/// Closed-form least-squares codebooks for fixed indicators over both
/// modalities: C = [F_a B_a^T + F_b B_b^T][B_a B_a^T + B_b B_b^T + ridge I]^-1,
/// solving the full joint (mk x mk) Gram system.
QuantizerModel UpdateCodebooks(const DenseFeatureMatrix& features_a,
                               const IndicatorSet& indicators_a,
                               const DenseFeatureMatrix& features_b,
                               const IndicatorSet& indicators_b, double ridge);

/// Single-modality form of UpdateCodebooks.
QuantizerModel UpdateCodebooks(const DenseFeatureMatrix& features,
                               const IndicatorSet& indicators, double ridge);

/// Sum over items of ||f - sum_l C^l b^l||^2.
double QuantizationObjective(const DenseFeatureMatrix& features,
                             const QuantizerModel& model,
                             const IndicatorSet& indicators);

struct QuantizerFit {
  QuantizerModel model;
  IndicatorSet indicators_a;
  IndicatorSet indicators_b;
  /// Joint objective after initial assignment, then after every codebook
  /// update and every re-assignment.
  std::vector<double> objective_history;
  std::size_t alternations_run = 0;
};

/// Init, greedy assignment, then up to `alternations` rounds of
/// (codebook update, re-assignment), stopping once no indicator changes.
QuantizerFit LearnQuantizer(const DenseFeatureMatrix& features_a,
                            const DenseFeatureMatrix& features_b,
                            std::size_t num_books, std::size_t book_size,
                            std::size_t alternations, std::uint64_t seed,
                            const QuantizerOptions& options = {});

/// Warm-started alternation: re-assigns from the previous indicators, then
/// alternates like LearnQuantizer.
QuantizerFit RefineQuantizer(const DenseFeatureMatrix& features_a,
                             const DenseFeatureMatrix& features_b,
                             const QuantizerModel& model,
                             const IndicatorSet& prev_a,
                             const IndicatorSet& prev_b,
                             std::size_t alternations,
                             const QuantizerOptions& options = {});

AqdLookupTable BuildLookupTable(std::span<const float> query,
                                const QuantizerModel& model);

/// Sum over books of table[l][indices[l]]; larger means more similar.
double Aqd(const AqdLookupTable& table, std::span<const std::uint16_t> indices);

/// sum_l C^l b^l written into `out` (size n).
void Reconstruct(const QuantizerModel& model,
                 std::span<const std::uint16_t> indices, std::span<double> out);

double QuantizationResidualNorm(std::span<const float> feature,
                                const QuantizerModel& model,
                                std::span<const std::uint16_t> indices);

}  // namespace hq
