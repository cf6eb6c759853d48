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

#include <cstdint>
#include <string_view>

namespace hq {

enum class ModelVariant { kLossless, kQuantization, kBinaryHash, kHashQuant };

std::string_view ModelVariantName(ModelVariant variant);

/// Shape of a compact-code database: N items of dimension n, m books of k
/// entries, and the stage-1 shortlist size (alpha * N).
struct CostModel {
  std::uint64_t count = 0;
  std::uint64_t dim = 0;
  std::uint64_t num_books = 0;
  std::uint64_t book_size = 0;
  std::uint64_t candidates = 0;
};

/// Storage in bits:
///   lossless      32 N n
///   quantization  32 m k n + N m log2(k)
///   binary hash   N n
///   hash + quant  N n + 32 m k n + N m log2(k)
/// Throws KNotPowerOfTwo for the quantized variants when k is not 2^p.
std::uint64_t MemoryFootprintBits(const CostModel& cost, ModelVariant variant);

/// Operations per query:
///   lossless, binary hash  N n
///   quantization           m k n + N m
///   hash + quant           N n + m k n + candidates * m
std::uint64_t OpCount(const CostModel& cost, ModelVariant variant);

}  // namespace hq
