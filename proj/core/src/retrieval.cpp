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

#include "hq/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "hq/binary_io.hpp"
#include "hq/error.hpp"

namespace hq {
namespace {

constexpr char kIndexMagic[] = "HQX1";
constexpr char kQuantizerMagic[] = "HQQ1";
constexpr char kIndicatorMagic[] = "IND1";
constexpr std::uint32_t kIndexVersion = 1;

bool Better(const ScoredItem& a, const ScoredItem& b) {
  return a.score != b.score ? a.score > b.score : a.index < b.index;
}

// Bounded heap whose front is the worst kept item.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

  void Offer(std::uint32_t index, double score) {
    const ScoredItem item{index, score};
    if (heap_.size() < k_) {
      heap_.push_back(item);
      std::push_heap(heap_.begin(), heap_.end(), Better);
    } else if (k_ > 0 && Better(item, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), Better);
      heap_.back() = item;
      std::push_heap(heap_.begin(), heap_.end(), Better);
    }
  }

  RankedResult Finish() && {
    std::sort_heap(heap_.begin(), heap_.end(), Better);
    return {std::move(heap_)};
  }

 private:
  std::size_t k_;
  std::vector<ScoredItem> heap_;
};

// AQD of one item from a precomputed table.
inline double ItemAqd(const double* table, std::size_t book_size,
                      const std::uint16_t* codes, std::size_t num_books) {
  double score = 0.0;
  for (std::size_t l = 0; l < num_books; ++l) score += table[l * book_size + codes[l]];
  return score;
}

void CheckQuery(std::span<const float> query, const RetrievalIndex& index) {
  Require(query.size() == index.dim(), ErrorCode::kDimMismatch,
          "query dim differs from index dim");
}

std::vector<std::uint64_t> QueryCode(std::span<const float> query) {
  std::vector<std::uint64_t> code(WordsForBits(query.size()));
  SignEncodeRow(query, code);
  return code;
}

}  // namespace

RetrievalIndex::RetrievalIndex(PackedHashCodes hash_codes,
                               QuantizerModel quantizer, IndicatorSet indicators)
    : hash_codes_(std::move(hash_codes)),
      quantizer_(std::move(quantizer)),
      indicators_(std::move(indicators)) {
  Require(hash_codes_.count() == indicators_.count(), ErrorCode::kCountMismatch,
          "hash code count differs from indicator count");
  Require(hash_codes_.dim() == quantizer_.dim(), ErrorCode::kDimMismatch,
          "hash code dim differs from codebook dim");
  Require(indicators_.num_books() == quantizer_.num_books() &&
              indicators_.book_size() == quantizer_.book_size(),
          ErrorCode::kDimMismatch, "indicator shape differs from codebooks");
}

RetrievalIndex BuildIndex(const DenseFeatureMatrix& features,
                          QuantizerModel quantizer, IndicatorSet indicators) {
  Require(features.dim() == quantizer.dim(), ErrorCode::kDimMismatch,
          "feature dim differs from codebook dim");
  Require(features.count() == indicators.count(), ErrorCode::kCountMismatch,
          "feature count differs from indicator count");
  return RetrievalIndex(SignEncode(features), std::move(quantizer),
                        std::move(indicators));
}

RankedResult TwoStageQuery(std::span<const float> query,
                           const RetrievalIndex& index, std::size_t candidates,
                           std::size_t top_k) {
  CheckQuery(query, index);
  if (candidates > index.count()) {
    Throw(ErrorCode::kTooManyCandidates, "candidates exceeds database size");
  }
  Require(top_k <= candidates, ErrorCode::kInvalidArgument,
          "top_k must not exceed candidates");
  const auto code = QueryCode(query);
  const auto shortlist = HammingTopCandidates(code, index.hash_codes(), candidates);

  const auto table = BuildLookupTable(query, index.quantizer());
  const std::size_t m = table.num_books;
  const std::uint16_t* codes = index.indicators().indices().data();
  TopK top(top_k);
  for (const auto& c : shortlist) {
    top.Offer(c.index, ItemAqd(table.values.data(), table.book_size,
                               codes + static_cast<std::size_t>(c.index) * m, m));
  }
  return std::move(top).Finish();
}

RankedResult FullAqdQuery(std::span<const float> query,
                          const RetrievalIndex& index, std::size_t top_k) {
  CheckQuery(query, index);
  Require(top_k <= index.count(), ErrorCode::kTooManyCandidates,
          "top_k exceeds database size");
  const auto table = BuildLookupTable(query, index.quantizer());
  const std::size_t m = table.num_books;
  const std::uint16_t* codes = index.indicators().indices().data();
  TopK top(top_k);
  for (std::size_t i = 0; i < index.count(); ++i) {
    top.Offer(static_cast<std::uint32_t>(i),
              ItemAqd(table.values.data(), table.book_size, codes + i * m, m));
  }
  return std::move(top).Finish();
}

RankedResult HashOnlyQuery(std::span<const float> query,
                           const RetrievalIndex& index, std::size_t top_k) {
  CheckQuery(query, index);
  if (top_k > index.count()) {
    Throw(ErrorCode::kTooManyCandidates, "top_k exceeds database size");
  }
  const auto code = QueryCode(query);
  RankedResult out;
  for (const auto& c : HammingTopCandidates(code, index.hash_codes(), top_k)) {
    out.items.push_back({c.index, -static_cast<double>(c.distance)});
  }
  return out;
}

RankedResult LosslessQuery(std::span<const float> query,
                           const DenseFeatureMatrix& database, std::size_t top_k) {
  Require(query.size() == database.dim(), ErrorCode::kDimMismatch,
          "query dim differs from database dim");
  Require(top_k <= database.count(), ErrorCode::kTooManyCandidates,
          "top_k exceeds database size");
  auto norm = [](std::span<const float> v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
  };
  const double qn = norm(query);
  if (qn == 0.0) Throw(ErrorCode::kZeroNormVector, "query has zero norm");
  TopK top(top_k);
  for (std::size_t i = 0; i < database.count(); ++i) {
    const auto row = database.row(i);
    const double rn = norm(row);
    if (rn == 0.0) Throw(ErrorCode::kZeroNormVector, "database row has zero norm");
    double dot = 0.0;
    for (std::size_t d = 0; d < row.size(); ++d) {
      dot += static_cast<double>(query[d]) * row[d];
    }
    top.Offer(static_cast<std::uint32_t>(i), dot / (qn * rn));
  }
  return std::move(top).Finish();
}

std::size_t IndexFileSize(std::size_t count, std::size_t dim,
                          std::size_t num_books, std::size_t book_size) {
  return 4 + 5 * 4 + count * WordsForBits(dim) * 8 +
         num_books * book_size * dim * 4 + count * num_books * 2;
}

std::vector<std::uint8_t> EncodeIndex(const RetrievalIndex& index) {
  const auto& q = index.quantizer();
  io::ByteWriter w;
  w.Magic(kIndexMagic);
  w.U32(kIndexVersion);
  w.U32(static_cast<std::uint32_t>(index.count()));
  w.U32(static_cast<std::uint32_t>(index.dim()));
  w.U32(static_cast<std::uint32_t>(q.num_books()));
  w.U32(static_cast<std::uint32_t>(q.book_size()));
  for (std::uint64_t word : index.hash_codes().words()) w.U64(word);
  for (float v : q.codebooks()) w.F32(v);
  for (std::uint16_t v : index.indicators().indices()) w.U16(v);
  return w.bytes();
}

RetrievalIndex DecodeIndex(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.ExpectMagic(kIndexMagic);
  const std::uint32_t version = r.U32();
  if (version != kIndexVersion) {
    Throw(ErrorCode::kVersionMismatch,
          "index version " + std::to_string(version) + " is not supported");
  }
  const std::size_t count = r.U32();
  const std::size_t dim = r.U32();
  const std::size_t m = r.U32();
  const std::size_t k = r.U32();

  const std::size_t words = count * WordsForBits(dim);
  r.Need(words * 8, "hash code section");
  std::vector<std::uint64_t> hash(words);
  for (auto& v : hash) v = r.U64();

  r.Need(m * k * dim * 4, "codebook section");
  std::vector<float> books(m * k * dim);
  for (auto& v : books) v = r.F32();

  r.Need(count * m * 2, "indicator section");
  std::vector<std::uint16_t> ind(count * m);
  for (auto& v : ind) v = r.U16();

  return RetrievalIndex(PackedHashCodes(count, dim, std::move(hash)),
                        QuantizerModel(m, k, dim, std::move(books)),
                        IndicatorSet(count, m, k, std::move(ind)));
}

void SaveIndex(const RetrievalIndex& index, const std::filesystem::path& path) {
  io::WriteFile(path, EncodeIndex(index));
}

RetrievalIndex LoadIndex(const std::filesystem::path& path) {
  return DecodeIndex(io::ReadFile(path));
}

void SaveQuantizer(const QuantizerModel& model, const std::filesystem::path& path) {
  io::ByteWriter w;
  w.Magic(kQuantizerMagic);
  w.U32(static_cast<std::uint32_t>(model.num_books()));
  w.U32(static_cast<std::uint32_t>(model.book_size()));
  w.U32(static_cast<std::uint32_t>(model.dim()));
  for (float v : model.codebooks()) w.F32(v);
  io::WriteFile(path, w.bytes());
}

QuantizerModel LoadQuantizer(const std::filesystem::path& path) {
  const auto bytes = io::ReadFile(path);
  io::ByteReader r(bytes);
  r.ExpectMagic(kQuantizerMagic);
  const std::size_t m = r.U32();
  const std::size_t k = r.U32();
  const std::size_t n = r.U32();
  r.Need(m * k * n * 4, "codebook section");
  std::vector<float> books(m * k * n);
  for (auto& v : books) v = r.F32();
  return QuantizerModel(m, k, n, std::move(books));
}

void SaveIndicators(const IndicatorSet& ind, const std::filesystem::path& path) {
  io::ByteWriter w;
  w.Magic(kIndicatorMagic);
  w.U32(static_cast<std::uint32_t>(ind.count()));
  w.U32(static_cast<std::uint32_t>(ind.num_books()));
  w.U32(static_cast<std::uint32_t>(ind.book_size()));
  for (std::uint16_t v : ind.indices()) w.U16(v);
  io::WriteFile(path, w.bytes());
}

IndicatorSet LoadIndicators(const std::filesystem::path& path) {
  const auto bytes = io::ReadFile(path);
  io::ByteReader r(bytes);
  r.ExpectMagic(kIndicatorMagic);
  const std::size_t count = r.U32();
  const std::size_t m = r.U32();
  const std::size_t k = r.U32();
  r.Need(count * m * 2, "indicator section");
  std::vector<std::uint16_t> ind(count * m);
  for (auto& v : ind) v = r.U16();
  return IndicatorSet(count, m, k, std::move(ind));
}

}  // namespace hq
