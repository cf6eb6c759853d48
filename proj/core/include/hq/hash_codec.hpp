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

/// One packed +-1 code: bit d is set iff component d is +1. Bits at or
/// above `dim` in the last word are always zero.
using CodeView = std::span<const std::uint64_t>;

constexpr std::size_t WordsForBits(std::size_t bits) { return (bits + 63) / 64; }

class PackedHashCodes {
 public:
  /// Validates the word count and that padding bits are clear.
  PackedHashCodes(std::size_t count, std::size_t dim,
                  std::vector<std::uint64_t> words);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  std::size_t words_per_code() const { return words_per_code_; }

  CodeView code(std::size_t i) const {
    return {words_.data() + i * words_per_code_, words_per_code_};
  }
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const PackedHashCodes&) const = default;

 private:
  std::size_t count_;
  std::size_t dim_;
  std::size_t words_per_code_;
  std::vector<std::uint64_t> words_;
};

/// sgn with sgn(0) = +1.
inline bool SignBit(double v) { return v >= 0.0; }

PackedHashCodes SignEncode(const DenseFeatureMatrix& features);

/// Packs a single row into `out` (size WordsForBits(row.size())).
void SignEncodeRow(std::span<const float> row, std::span<std::uint64_t> out);

/// Number of differing bits; throws DimMismatch on differing word counts.
std::size_t HammingDistance(CodeView x, CodeView y);

struct HammingCandidate {
  std::uint32_t index;
  std::uint32_t distance;

  bool operator==(const HammingCandidate&) const = default;
};

/// The `candidates` items closest to `query` in Hamming distance, sorted by
/// (distance, index). Uses a bounded max-heap of size `candidates`.
std::vector<HammingCandidate> HammingTopCandidates(
    CodeView query, const PackedHashCodes& database, std::size_t candidates);

}  // namespace hq
