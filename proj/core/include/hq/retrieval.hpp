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
#include "hq/hash_codec.hpp"
#include "hq/quantizer.hpp"

namespace hq {

/// Immutable joint index: one n-bit hash code and m quantizer indices per
/// database item, plus the shared codebooks.
class RetrievalIndex {
 public:
  /// Throws CountMismatch / DimMismatch when the parts disagree.
  RetrievalIndex(PackedHashCodes hash_codes, QuantizerModel quantizer,
                 IndicatorSet indicators);

  std::size_t count() const { return hash_codes_.count(); }
  std::size_t dim() const { return hash_codes_.dim(); }
  const PackedHashCodes& hash_codes() const { return hash_codes_; }
  const QuantizerModel& quantizer() const { return quantizer_; }
  const IndicatorSet& indicators() const { return indicators_; }

  bool operator==(const RetrievalIndex&) const = default;

 private:
  PackedHashCodes hash_codes_;
  QuantizerModel quantizer_;
  IndicatorSet indicators_;
};

struct ScoredItem {
  std::uint32_t index;
  double score;

  bool operator==(const ScoredItem&) const = default;
};

/// Ordered by score descending, then index ascending.
struct RankedResult {
  std::vector<ScoredItem> items;

  bool operator==(const RankedResult&) const = default;
};

/// Hash codes are the sign pattern of `features`.
RetrievalIndex BuildIndex(const DenseFeatureMatrix& features,
                          QuantizerModel quantizer, IndicatorSet indicators);

/// Stage 1 scans all hash codes for the `candidates` nearest items in
/// Hamming distance; stage 2 re-ranks them by AQD against the raw query.
RankedResult TwoStageQuery(std::span<const float> query,
                           const RetrievalIndex& index, std::size_t candidates,
                           std::size_t top_k);

/// Quantization-only baseline: AQD against every item.
RankedResult FullAqdQuery(std::span<const float> query,
                          const RetrievalIndex& index, std::size_t top_k);

/// Hash-only baseline: score = -Hamming distance.
RankedResult HashOnlyQuery(std::span<const float> query,
                           const RetrievalIndex& index, std::size_t top_k);

/// Lossless baseline: cosine similarity on uncompressed features.
RankedResult LosslessQuery(std::span<const float> query,
                           const DenseFeatureMatrix& database, std::size_t top_k);

/// HQX1 layout: "HQX1" | u32 version=1 | u32 N | u32 n | u32 m | u32 k |
/// N*ceil(n/64) u64 hash words | m*k*n f32 codebooks | N*m u16 indices.
std::vector<std::uint8_t> EncodeIndex(const RetrievalIndex& index);
RetrievalIndex DecodeIndex(std::span<const std::uint8_t> bytes);
void SaveIndex(const RetrievalIndex& index, const std::filesystem::path& path);
RetrievalIndex LoadIndex(const std::filesystem::path& path);

/// Byte size of an HQX1 file for the given shape.
std::size_t IndexFileSize(std::size_t count, std::size_t dim,
                          std::size_t num_books, std::size_t book_size);

/// "HQQ1" | u32 m | u32 k | u32 n | m*k*n f32 codebooks.
void SaveQuantizer(const QuantizerModel& model, const std::filesystem::path& path);
QuantizerModel LoadQuantizer(const std::filesystem::path& path);
/// "IND1" | u32 N | u32 m | u32 k | N*m u16 indices.
void SaveIndicators(const IndicatorSet& ind, const std::filesystem::path& path);
IndicatorSet LoadIndicators(const std::filesystem::path& path);

}  // namespace hq
