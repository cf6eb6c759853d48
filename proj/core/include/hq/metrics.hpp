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
#include <string>
#include <string_view>
#include <vector>

#include "hq/feature_store.hpp"
#include "hq/retrieval.hpp"

namespace hq {

/// AP@R = sum_{r <= R} P(r) rel(r) / min(|relevant|, R); 0 without any
/// relevant item. `relevant[i]` flags database item i.
double AveragePrecisionAt(std::span<const std::uint32_t> ranked_items,
                          std::span<const std::uint8_t> relevant,
                          std::size_t cutoff);
double AveragePrecisionAt(const RankedResult& ranking,
                          std::span<const std::uint8_t> relevant,
                          std::size_t cutoff);

/// 2ab / (a + b), or 0 when a + b = 0.
double HarmonicMean(double a, double b);

enum class QueryMode { kTwoStage, kFullAqd, kHashOnly, kLossless };

std::string_view QueryModeName(QueryMode mode);
/// Accepts two_stage, aqd (or full_aqd), hash (or hash_only), lossless.
QueryMode ParseQueryMode(std::string_view name);

/// One retrieval direction: queries from one modality against a database
/// of the other. `database_features` backs the lossless mode.
struct RetrievalTask {
  const DenseFeatureMatrix& queries;
  const LabelSet& query_labels;
  const RetrievalIndex& index;
  const DenseFeatureMatrix& database_features;
  const LabelSet& database_labels;
};

/// Runs one query in `mode`. The two-stage mode keeps min(top_k, candidates)
/// results.
RankedResult RunQuery(const RetrievalTask& task, std::size_t query,
                      QueryMode mode, std::size_t candidates, std::size_t top_k);

/// Database items sharing at least one label with query `query`.
std::vector<std::uint8_t> RelevantItems(const RetrievalTask& task,
                                        std::size_t query);

struct MapResult {
  double map = 0.0;
  std::vector<double> per_query;
};

/// Mean of AP@cutoff over all queries of the task.
MapResult MapAt(const RetrievalTask& task, QueryMode mode,
                std::size_t candidates, std::size_t cutoff);

struct EvalReport {
  double map_i2t = 0.0;
  double map_t2i = 0.0;
  double harmonic_mean = 0.0;
  std::vector<double> ap_i2t;
  std::vector<double> ap_t2i;
  std::string config;
};

EvalReport Evaluate(const RetrievalTask& i2t, const RetrievalTask& t2i,
                    QueryMode mode, std::size_t candidates, std::size_t cutoff,
                    std::string config_echo);

}  // namespace hq
