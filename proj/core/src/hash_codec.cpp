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

#include "hq/hash_codec.hpp"

#include <algorithm>
#include <bit>
#include <queue>

#include "hq/error.hpp"

namespace hq {
namespace {

std::uint64_t PaddingMask(std::size_t dim) {
  const std::size_t used = dim % 64;
  return used == 0 ? 0 : ~((std::uint64_t{1} << used) - 1);
}

template <std::size_t kWords>
std::size_t FixedHamming(const std::uint64_t* x, const std::uint64_t* y) {
  std::size_t sum = 0;
  for (std::size_t w = 0; w < kWords; ++w) sum += std::popcount(x[w] ^ y[w]);
  return sum;
}

std::size_t VariableHamming(const std::uint64_t* x, const std::uint64_t* y,
                            std::size_t words) {
  std::size_t sum = 0;
  for (std::size_t w = 0; w < words; ++w) sum += std::popcount(x[w] ^ y[w]);
  return sum;
}

bool CandidateLess(const HammingCandidate& a, const HammingCandidate& b) {
  return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
}

// Scan with the word count fixed at compile time for the common code sizes.
template <typename Distance>
std::vector<HammingCandidate> HeapScan(const PackedHashCodes& db,
                                       std::size_t candidates,
                                       Distance&& distance) {
  std::vector<HammingCandidate> heap;
  heap.reserve(candidates + 1);
  const std::size_t wpc = db.words_per_code();
  const std::uint64_t* base = db.words().data();
  const std::size_t count = db.count();
  std::size_t i = 0;
  for (; i < count && heap.size() < candidates; ++i) {
    heap.push_back({static_cast<std::uint32_t>(i),
                    static_cast<std::uint32_t>(distance(base + i * wpc))});
    std::push_heap(heap.begin(), heap.end(), CandidateLess);
  }
  for (; i < count; ++i) {
    const auto d = static_cast<std::uint32_t>(distance(base + i * wpc));
    // Items arrive in ascending index order, so an equal distance never
    // displaces the current worst entry.
    if (d < heap.front().distance) {
      std::pop_heap(heap.begin(), heap.end(), CandidateLess);
      heap.back() = {static_cast<std::uint32_t>(i), d};
      std::push_heap(heap.begin(), heap.end(), CandidateLess);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), CandidateLess);
  return heap;
}

}  // namespace

PackedHashCodes::PackedHashCodes(std::size_t count, std::size_t dim,
                                 std::vector<std::uint64_t> words)
    : count_(count),
      dim_(dim),
      words_per_code_(WordsForBits(dim)),
      words_(std::move(words)) {
  Require(count_ >= 1 && dim_ >= 1, ErrorCode::kInvalidArgument,
          "hash codes need count >= 1 and dim >= 1");
  Require(words_.size() == count_ * words_per_code_,
          ErrorCode::kInvalidArgument, "hash word count mismatch");
  const std::uint64_t pad = PaddingMask(dim_);
  for (std::size_t i = 0; i < count_; ++i) {
    Require((words_[(i + 1) * words_per_code_ - 1] & pad) == 0,
            ErrorCode::kInvalidArgument, "hash code padding bits set");
  }
}

void SignEncodeRow(std::span<const float> row, std::span<std::uint64_t> out) {
  Require(out.size() == WordsForBits(row.size()), ErrorCode::kDimMismatch,
          "output word span has the wrong size");
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t d = 0; d < row.size(); ++d) {
    if (SignBit(row[d])) out[d / 64] |= std::uint64_t{1} << (d % 64);
  }
}

PackedHashCodes SignEncode(const DenseFeatureMatrix& features) {
  const std::size_t wpc = WordsForBits(features.dim());
  std::vector<std::uint64_t> words(features.count() * wpc);
  for (std::size_t i = 0; i < features.count(); ++i) {
    SignEncodeRow(features.row(i), {words.data() + i * wpc, wpc});
  }
  return PackedHashCodes(features.count(), features.dim(), std::move(words));
}

std::size_t HammingDistance(CodeView x, CodeView y) {
  Require(x.size() == y.size(), ErrorCode::kDimMismatch,
          "hash codes have different lengths");
  return VariableHamming(x.data(), y.data(), x.size());
}

std::vector<HammingCandidate> HammingTopCandidates(
    CodeView query, const PackedHashCodes& database, std::size_t candidates) {
  Require(query.size() == database.words_per_code(), ErrorCode::kDimMismatch,
          "query code length differs from database");
  if (candidates > database.count()) {
    Throw(ErrorCode::kTooManyCandidates,
          "requested more candidates than database items");
  }
  if (candidates == 0) return {};
  const std::uint64_t* q = query.data();
  switch (database.words_per_code()) {
    case 1:
      return HeapScan(database, candidates,
                      [q](const std::uint64_t* c) { return FixedHamming<1>(q, c); });
    case 2:
      return HeapScan(database, candidates,
                      [q](const std::uint64_t* c) { return FixedHamming<2>(q, c); });
    case 4:
      return HeapScan(database, candidates,
                      [q](const std::uint64_t* c) { return FixedHamming<4>(q, c); });
    case 8:
      return HeapScan(database, candidates,
                      [q](const std::uint64_t* c) { return FixedHamming<8>(q, c); });
    default: {
      const std::size_t words = database.words_per_code();
      return HeapScan(database, candidates, [q, words](const std::uint64_t* c) {
        return VariableHamming(q, c, words);
      });
    }
  }
}

}  // namespace hq
