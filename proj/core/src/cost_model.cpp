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

#include "hq/cost_model.hpp"

#include <bit>

#include "hq/error.hpp"

namespace hq {
namespace {

std::uint64_t Log2Exact(std::uint64_t k) {
  if (!std::has_single_bit(k)) {
    Throw(ErrorCode::kKNotPowerOfTwo, "book size must be a power of two");
  }
  return static_cast<std::uint64_t>(std::countr_zero(k));
}

}  // namespace

std::string_view ModelVariantName(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kLossless: return "lossless";
    case ModelVariant::kQuantization: return "quantization";
    case ModelVariant::kBinaryHash: return "binary_hash";
    case ModelVariant::kHashQuant: return "hq";
  }
  return "unknown";
}

std::uint64_t MemoryFootprintBits(const CostModel& c, ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kLossless:
      return 32 * c.count * c.dim;
    case ModelVariant::kQuantization:
      return 32 * c.num_books * c.book_size * c.dim +
             c.count * c.num_books * Log2Exact(c.book_size);
    case ModelVariant::kBinaryHash:
      return c.count * c.dim;
    case ModelVariant::kHashQuant:
      return c.count * c.dim + 32 * c.num_books * c.book_size * c.dim +
             c.count * c.num_books * Log2Exact(c.book_size);
  }
  return 0;
}

std::uint64_t OpCount(const CostModel& c, ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kLossless:
    case ModelVariant::kBinaryHash:
      return c.count * c.dim;
    case ModelVariant::kQuantization:
      return c.num_books * c.book_size * c.dim + c.count * c.num_books;
    case ModelVariant::kHashQuant:
      return c.count * c.dim + c.num_books * c.book_size * c.dim +
             c.candidates * c.num_books;
  }
  return 0;
}

}  // namespace hq
