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

#include "hq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string_view>
#include <unordered_set>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hq/error.hpp"

namespace hq {
namespace {

constexpr std::size_t kMaxBookSize = 65536;

void CheckDims(const DenseFeatureMatrix& features, const QuantizerModel& model) {
  Require(features.dim() == model.dim(), ErrorCode::kDimMismatch,
          "feature dim differs from codebook dim");
}

void CheckIndicators(const IndicatorSet& ind, const QuantizerModel& model,
                     std::size_t count) {
  Require(ind.count() == count, ErrorCode::kCountMismatch,
          "indicator count differs from feature count");
  Require(ind.num_books() == model.num_books() &&
              ind.book_size() == model.book_size(),
          ErrorCode::kDimMismatch, "indicator shape differs from codebooks");
}

double SquaredDistance(std::span<const double> r, std::span<const float> c) {
  double sum = 0.0;
  for (std::size_t d = 0; d < r.size(); ++d) {
    const double diff = r[d] - static_cast<double>(c[d]);
    sum += diff * diff;
  }
  return sum;
}

// Iterated conditional modes for one item. `residual` holds
// f - sum over assigned books; `assigned[l]` says whether book l contributes.
void DescendItem(const QuantizerModel& model, std::span<std::uint16_t> choice,
                 std::vector<char>& assigned, std::vector<double>& residual,
                 std::size_t max_rounds) {
  const std::size_t n = model.dim();
  const std::size_t k = model.book_size();
  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (std::size_t l = 0; l < model.num_books(); ++l) {
      if (assigned[l]) {
        const auto col = model.column(l, choice[l]);
        for (std::size_t d = 0; d < n; ++d) residual[d] += col[d];
      }
      // Lowest index wins ties; an assigned book keeps its entry on ties.
      std::size_t best = assigned[l] ? choice[l] : 0;
      double best_score = SquaredDistance(residual, model.column(l, best));
      for (std::size_t j = 0; j < k; ++j) {
        if (j == best) continue;
        const double score = SquaredDistance(residual, model.column(l, j));
        if (score < best_score) {
          best_score = score;
          best = j;
        }
      }
      if (!assigned[l] || best != choice[l]) changed = true;
      choice[l] = static_cast<std::uint16_t>(best);
      assigned[l] = 1;
      const auto col = model.column(l, best);
      for (std::size_t d = 0; d < n; ++d) residual[d] -= col[d];
    }
    if (!changed) break;
  }
}

IndicatorSet Assign(const DenseFeatureMatrix& features,
                    const QuantizerModel& model, const IndicatorSet* prev,
                    std::size_t max_rounds) {
  CheckDims(features, model);
  if (prev != nullptr) CheckIndicators(*prev, model, features.count());
  const std::size_t m = model.num_books();
  const std::size_t n = model.dim();
  std::vector<std::uint16_t> out(features.count() * m, 0);
  std::vector<char> assigned(m);
  std::vector<double> residual(n);
  // The greedy pass of an empty start counts as a round.
  const std::size_t rounds = prev == nullptr ? std::max<std::size_t>(max_rounds, 1)
                                             : max_rounds;
  for (std::size_t i = 0; i < features.count(); ++i) {
    const auto f = features.row(i);
    std::copy(f.begin(), f.end(), residual.begin());
    std::span<std::uint16_t> choice(out.data() + i * m, m);
    if (prev != nullptr) {
      const auto p = prev->item(i);
      std::copy(p.begin(), p.end(), choice.begin());
      std::fill(assigned.begin(), assigned.end(), 1);
      for (std::size_t l = 0; l < m; ++l) {
        const auto col = model.column(l, choice[l]);
        for (std::size_t d = 0; d < n; ++d) residual[d] -= col[d];
      }
    } else {
      std::fill(assigned.begin(), assigned.end(), 0);
    }
    DescendItem(model, choice, assigned, residual, rounds);
  }
  return IndicatorSet(features.count(), m, model.book_size(), std::move(out));
}

// Picks k rows in seeded random order, preferring rows whose values have not
// been taken yet; duplicates fill the remainder only when too few distinct
// rows exist.
std::vector<std::size_t> SampleDistinctRows(std::span<const double> rows,
                                            std::size_t count, std::size_t dim,
                                            std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> picked;
  std::vector<std::size_t> spare;
  std::unordered_set<std::string_view> seen;
  picked.reserve(k);
  for (std::size_t idx : order) {
    if (picked.size() == k) break;
    const std::string_view key(reinterpret_cast<const char*>(rows.data() + idx * dim),
                               dim * sizeof(double));
    if (seen.insert(key).second) {
      picked.push_back(idx);
    } else {
      spare.push_back(idx);
    }
  }
  for (std::size_t s = 0; picked.size() < k; ++s) picked.push_back(spare[s]);
  return picked;
}

struct GramSystem {
  Eigen::MatrixXd gram;  // (mk x mk) joint indicator co-occurrence counts
  Eigen::MatrixXd rhs;   // (mk x n) per-entry feature sums
};

void Accumulate(GramSystem& sys, const DenseFeatureMatrix& features,
                const IndicatorSet& ind) {
  const std::size_t m = ind.num_books();
  const std::size_t k = ind.book_size();
  const std::size_t n = features.dim();
  for (std::size_t i = 0; i < features.count(); ++i) {
    const auto b = ind.item(i);
    const auto f = features.row(i);
    for (std::size_t l = 0; l < m; ++l) {
      const std::size_t row = l * k + b[l];
      for (std::size_t l2 = 0; l2 < m; ++l2) sys.gram(row, l2 * k + b[l2]) += 1.0;
      for (std::size_t d = 0; d < n; ++d) sys.rhs(row, d) += f[d];
    }
  }
}

QuantizerModel SolveCodebooks(GramSystem& sys, std::size_t m, std::size_t k,
                              std::size_t n, double ridge) {
  Require(ridge >= 0.0 && std::isfinite(ridge), ErrorCode::kInvalidArgument,
          "ridge must be finite and >= 0");
  const auto size = static_cast<Eigen::Index>(m * k);
  Eigen::MatrixXd solution;
  if (ridge > 0.0) {
    sys.gram.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(sys.gram);
    if (llt.info() != Eigen::Success) {
      Throw(ErrorCode::kSingularSystem, "codebook Gram not positive definite");
    }
    solution = llt.solve(sys.rhs);
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.gram);
    const auto diag = ldlt.vectorD().cwiseAbs();
    const double scale = std::max(1.0, diag.maxCoeff());
    if (ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-12 * scale) {
      Throw(ErrorCode::kSingularSystem,
            "codebook Gram is singular; use a positive ridge");
    }
    solution = ldlt.solve(sys.rhs);
  }
  std::vector<float> books(static_cast<std::size_t>(size) * n);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (std::size_t d = 0; d < n; ++d) {
      books[static_cast<std::size_t>(r) * n + d] =
          static_cast<float>(solution(r, static_cast<Eigen::Index>(d)));
    }
  }
  return QuantizerModel(m, k, n, std::move(books));
}

DenseFeatureMatrix Stack(const DenseFeatureMatrix& a, const DenseFeatureMatrix& b) {
  Require(a.dim() == b.dim(), ErrorCode::kDimMismatch,
          "modalities have different feature dims");
  std::vector<float> values(a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  return DenseFeatureMatrix(a.count() + b.count(), a.dim(), std::move(values));
}

QuantizerFit Alternate(const DenseFeatureMatrix& fa, const DenseFeatureMatrix& fb,
                       QuantizerModel model, IndicatorSet ia, IndicatorSet ib,
                       std::size_t alternations, const QuantizerOptions& options) {
  auto objective = [&](const QuantizerModel& mdl, const IndicatorSet& a,
                       const IndicatorSet& b) {
    return QuantizationObjective(fa, mdl, a) + QuantizationObjective(fb, mdl, b);
  };
  QuantizerFit fit{model, ia, ib, {objective(model, ia, ib)}, 0};
  for (std::size_t t = 0; t < alternations; ++t) {
    fit.model = UpdateCodebooks(fa, fit.indicators_a, fb, fit.indicators_b,
                                options.ridge);
    fit.objective_history.push_back(
        objective(fit.model, fit.indicators_a, fit.indicators_b));
    auto na = AssignIndicators(fa, fit.model, fit.indicators_a, options.assign_rounds);
    auto nb = AssignIndicators(fb, fit.model, fit.indicators_b, options.assign_rounds);
    const bool changed = na != fit.indicators_a || nb != fit.indicators_b;
    fit.indicators_a = std::move(na);
    fit.indicators_b = std::move(nb);
    fit.objective_history.push_back(
        objective(fit.model, fit.indicators_a, fit.indicators_b));
    ++fit.alternations_run;
    if (!changed) break;
  }
  return fit;
}

}  // namespace

QuantizerModel::QuantizerModel(std::size_t num_books, std::size_t book_size,
                               std::size_t dim, std::vector<float> codebooks)
    : num_books_(num_books),
      book_size_(book_size),
      dim_(dim),
      codebooks_(std::move(codebooks)) {
  Require(num_books_ >= 1 && dim_ >= 1, ErrorCode::kInvalidArgument,
          "quantizer needs m >= 1 and n >= 1");
  Require(book_size_ >= 1 && book_size_ <= kMaxBookSize,
          ErrorCode::kInvalidArgument, "book size must be in [1, 65536]");
  Require(codebooks_.size() == num_books_ * book_size_ * dim_,
          ErrorCode::kInvalidArgument, "codebook value count mismatch");
  for (float v : codebooks_) {
    if (!std::isfinite(v)) Throw(ErrorCode::kNonFiniteValue, "codebook entry");
  }
}

IndicatorSet::IndicatorSet(std::size_t count, std::size_t num_books,
                           std::size_t book_size,
                           std::vector<std::uint16_t> indices)
    : count_(count),
      num_books_(num_books),
      book_size_(book_size),
      indices_(std::move(indices)) {
  Require(num_books_ >= 1, ErrorCode::kInvalidArgument, "indicator books");
  Require(book_size_ >= 1 && book_size_ <= kMaxBookSize,
          ErrorCode::kInvalidArgument, "indicator book size");
  Require(indices_.size() == count_ * num_books_, ErrorCode::kInvalidArgument,
          "indicator entry count mismatch");
  for (std::uint16_t v : indices_) {
    Require(v < book_size_, ErrorCode::kIndexOutOfRange,
            "indicator index >= book size");
  }
}

QuantizerModel InitCodebooks(const DenseFeatureMatrix& features,
                             std::size_t num_books, std::size_t book_size,
                             std::uint64_t seed) {
  if (features.count() < book_size) {
    Throw(ErrorCode::kNotEnoughItems, "need at least k items to seed codebooks");
  }
  Require(num_books >= 1, ErrorCode::kInvalidArgument, "need m >= 1");
  const std::size_t n = features.dim();
  const std::size_t count = features.count();
  std::mt19937_64 rng(seed);

  std::vector<double> residual(features.values().begin(), features.values().end());
  std::vector<float> books(num_books * book_size * n, 0.0f);
  for (std::size_t l = 0; l < num_books; ++l) {
    const auto rows = SampleDistinctRows(residual, count, n, book_size, rng);
    for (std::size_t j = 0; j < book_size; ++j) {
      for (std::size_t d = 0; d < n; ++d) {
        books[(l * book_size + j) * n + d] =
            static_cast<float>(residual[rows[j] * n + d]);
      }
    }
    if (l + 1 == num_books) break;
    // Greedy assignment to the new book, then peel it off the residual.
    const float* book = books.data() + l * book_size * n;
    for (std::size_t i = 0; i < count; ++i) {
      std::span<double> r(residual.data() + i * n, n);
      std::size_t best = 0;
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < book_size; ++j) {
        const double s = SquaredDistance(r, {book + j * n, n});
        if (s < best_score) {
          best_score = s;
          best = j;
        }
      }
      for (std::size_t d = 0; d < n; ++d) r[d] -= book[best * n + d];
    }
  }
  return QuantizerModel(num_books, book_size, n, std::move(books));
}

IndicatorSet AssignIndicators(const DenseFeatureMatrix& features,
                              const QuantizerModel& model,
                              std::size_t max_rounds) {
  return Assign(features, model, nullptr, max_rounds);
}

IndicatorSet AssignIndicators(const DenseFeatureMatrix& features,
                              const QuantizerModel& model,
                              const IndicatorSet& prev, std::size_t max_rounds) {
  return Assign(features, model, &prev, max_rounds);
}

QuantizerModel UpdateCodebooks(const DenseFeatureMatrix& features_a,
                               const IndicatorSet& indicators_a,
                               const DenseFeatureMatrix& features_b,
                               const IndicatorSet& indicators_b, double ridge) {
  Require(features_a.dim() == features_b.dim(), ErrorCode::kDimMismatch,
          "modalities have different feature dims");
  Require(indicators_a.num_books() == indicators_b.num_books() &&
              indicators_a.book_size() == indicators_b.book_size(),
          ErrorCode::kDimMismatch, "modalities use different (m, k)");
  Require(indicators_a.count() == features_a.count() &&
              indicators_b.count() == features_b.count(),
          ErrorCode::kCountMismatch, "indicator count differs from features");
  const std::size_t m = indicators_a.num_books();
  const std::size_t k = indicators_a.book_size();
  const std::size_t n = features_a.dim();
  const auto size = static_cast<Eigen::Index>(m * k);
  GramSystem sys{Eigen::MatrixXd::Zero(size, size),
                 Eigen::MatrixXd::Zero(size, static_cast<Eigen::Index>(n))};
  Accumulate(sys, features_a, indicators_a);
  Accumulate(sys, features_b, indicators_b);
  return SolveCodebooks(sys, m, k, n, ridge);
}

QuantizerModel UpdateCodebooks(const DenseFeatureMatrix& features,
                               const IndicatorSet& indicators, double ridge) {
  Require(indicators.count() == features.count(), ErrorCode::kCountMismatch,
          "indicator count differs from features");
  const std::size_t m = indicators.num_books();
  const std::size_t k = indicators.book_size();
  const std::size_t n = features.dim();
  const auto size = static_cast<Eigen::Index>(m * k);
  GramSystem sys{Eigen::MatrixXd::Zero(size, size),
                 Eigen::MatrixXd::Zero(size, static_cast<Eigen::Index>(n))};
  Accumulate(sys, features, indicators);
  return SolveCodebooks(sys, m, k, n, ridge);
}

double QuantizationObjective(const DenseFeatureMatrix& features,
                             const QuantizerModel& model,
                             const IndicatorSet& indicators) {
  CheckDims(features, model);
  CheckIndicators(indicators, model, features.count());
  double total = 0.0;
  for (std::size_t i = 0; i < features.count(); ++i) {
    const double r = QuantizationResidualNorm(features.row(i), model,
                                              indicators.item(i));
    total += r * r;
  }
  return total;
}

QuantizerFit LearnQuantizer(const DenseFeatureMatrix& features_a,
                            const DenseFeatureMatrix& features_b,
                            std::size_t num_books, std::size_t book_size,
                            std::size_t alternations, std::uint64_t seed,
                            const QuantizerOptions& options) {
  auto model = InitCodebooks(Stack(features_a, features_b), num_books,
                             book_size, seed);
  auto ia = AssignIndicators(features_a, model, options.assign_rounds);
  auto ib = AssignIndicators(features_b, model, options.assign_rounds);
  return Alternate(features_a, features_b, std::move(model), std::move(ia),
                   std::move(ib), alternations, options);
}

QuantizerFit RefineQuantizer(const DenseFeatureMatrix& features_a,
                             const DenseFeatureMatrix& features_b,
                             const QuantizerModel& model,
                             const IndicatorSet& prev_a,
                             const IndicatorSet& prev_b,
                             std::size_t alternations,
                             const QuantizerOptions& options) {
  auto ia = AssignIndicators(features_a, model, prev_a, options.assign_rounds);
  auto ib = AssignIndicators(features_b, model, prev_b, options.assign_rounds);
  return Alternate(features_a, features_b, model, std::move(ia), std::move(ib),
                   alternations, options);
}

AqdLookupTable BuildLookupTable(std::span<const float> query,
                                const QuantizerModel& model) {
  Require(query.size() == model.dim(), ErrorCode::kDimMismatch,
          "query dim differs from codebook dim");
  const std::size_t m = model.num_books();
  const std::size_t k = model.book_size();
  const std::size_t n = model.dim();
  AqdLookupTable table{m, k, std::vector<double>(m * k)};
  const float* col = model.codebooks().data();
  for (std::size_t e = 0; e < m * k; ++e, col += n) {
    double dot = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      dot += static_cast<double>(query[d]) * static_cast<double>(col[d]);
    }
    table.values[e] = dot;
  }
  return table;
}

double Aqd(const AqdLookupTable& table, std::span<const std::uint16_t> indices) {
  Require(indices.size() == table.num_books, ErrorCode::kDimMismatch,
          "one index per book required");
  double score = 0.0;
  for (std::size_t l = 0; l < table.num_books; ++l) {
    Require(indices[l] < table.book_size, ErrorCode::kIndexOutOfRange,
            "indicator index >= book size");
    score += table.values[l * table.book_size + indices[l]];
  }
  return score;
}

void Reconstruct(const QuantizerModel& model,
                 std::span<const std::uint16_t> indices, std::span<double> out) {
  Require(indices.size() == model.num_books() && out.size() == model.dim(),
          ErrorCode::kDimMismatch, "reconstruction shape mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t l = 0; l < model.num_books(); ++l) {
    Require(indices[l] < model.book_size(), ErrorCode::kIndexOutOfRange,
            "indicator index >= book size");
    const auto col = model.column(l, indices[l]);
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += col[d];
  }
}

double QuantizationResidualNorm(std::span<const float> feature,
                                const QuantizerModel& model,
                                std::span<const std::uint16_t> indices) {
  Require(feature.size() == model.dim(), ErrorCode::kDimMismatch,
          "feature dim differs from codebook dim");
  std::vector<double> recon(model.dim());
  Reconstruct(model, indices, recon);
  double sum = 0.0;
  for (std::size_t d = 0; d < recon.size(); ++d) {
    const double diff = static_cast<double>(feature[d]) - recon[d];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace hq
