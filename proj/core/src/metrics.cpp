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

#include "hq/metrics.hpp"

#include <algorithm>

#include "hq/error.hpp"

namespace hq {

double AveragePrecisionAt(std::span<const std::uint32_t> ranked_items,
                          std::span<const std::uint8_t> relevant,
                          std::size_t cutoff) {
  Require(cutoff >= 1, ErrorCode::kInvalidArgument, "cutoff must be >= 1");
  const auto total = static_cast<std::size_t>(
      std::count_if(relevant.begin(), relevant.end(), [](auto v) { return v != 0; }));
  if (total == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t depth = std::min(cutoff, ranked_items.size());
  for (std::size_t r = 0; r < depth; ++r) {
    const std::uint32_t item = ranked_items[r];
    Require(item < relevant.size(), ErrorCode::kIndexOutOfRange,
            "ranked item outside relevance mask");
    if (relevant[item]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(std::min(total, cutoff));
}

double AveragePrecisionAt(const RankedResult& ranking,
                          std::span<const std::uint8_t> relevant,
                          std::size_t cutoff) {
  std::vector<std::uint32_t> items;
  items.reserve(ranking.items.size());
  for (const auto& s : ranking.items) items.push_back(s.index);
  return AveragePrecisionAt(items, relevant, cutoff);
}

double HarmonicMean(double a, double b) {
  return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b);
}

std::string_view QueryModeName(QueryMode mode) {
  switch (mode) {
    case QueryMode::kTwoStage: return "two_stage";
    case QueryMode::kFullAqd: return "aqd";
    case QueryMode::kHashOnly: return "hash";
    case QueryMode::kLossless: return "lossless";
  }
  return "unknown";
}

QueryMode ParseQueryMode(std::string_view name) {
  if (name == "two_stage") return QueryMode::kTwoStage;
  if (name == "aqd" || name == "full_aqd") return QueryMode::kFullAqd;
  if (name == "hash" || name == "hash_only") return QueryMode::kHashOnly;
  if (name == "lossless") return QueryMode::kLossless;
  Throw(ErrorCode::kInvalidArgument, "unknown query mode '" + std::string(name) + "'");
}

RankedResult RunQuery(const RetrievalTask& task, std::size_t query,
                      QueryMode mode, std::size_t candidates, std::size_t top_k) {
  const auto q = task.queries.row(query);
  switch (mode) {
    case QueryMode::kTwoStage:
      return TwoStageQuery(q, task.index, candidates, std::min(top_k, candidates));
    case QueryMode::kFullAqd:
      return FullAqdQuery(q, task.index, top_k);
    case QueryMode::kHashOnly:
      return HashOnlyQuery(q, task.index, top_k);
    case QueryMode::kLossless:
      return LosslessQuery(q, task.database_features, top_k);
  }
  return {};
}

std::vector<std::uint8_t> RelevantItems(const RetrievalTask& task,
                                        std::size_t query) {
  const std::uint64_t mask = task.query_labels.mask(query);
  std::vector<std::uint8_t> out(task.database_labels.count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (task.database_labels.mask(i) & mask) != 0 ? 1 : 0;
  }
  return out;
}

MapResult MapAt(const RetrievalTask& task, QueryMode mode,
                std::size_t candidates, std::size_t cutoff) {
  Require(task.queries.count() == task.query_labels.count(),
          ErrorCode::kCountMismatch, "query labels do not match queries");
  Require(task.database_labels.count() == task.index.count(),
          ErrorCode::kCountMismatch, "database labels do not match index");
  const std::size_t top_k = std::min(cutoff, task.index.count());
  MapResult out;
  out.per_query.reserve(task.queries.count());
  for (std::size_t q = 0; q < task.queries.count(); ++q) {
    const auto ranking = RunQuery(task, q, mode, candidates, top_k);
    out.per_query.push_back(AveragePrecisionAt(ranking, RelevantItems(task, q), cutoff));
  }
  double sum = 0.0;
  for (double ap : out.per_query) sum += ap;
  out.map = sum / static_cast<double>(out.per_query.size());
  return out;
}

EvalReport Evaluate(const RetrievalTask& i2t, const RetrievalTask& t2i,
                    QueryMode mode, std::size_t candidates, std::size_t cutoff,
                    std::string config_echo) {
  auto a = MapAt(i2t, mode, candidates, cutoff);
  auto b = MapAt(t2i, mode, candidates, cutoff);
  EvalReport report;
  report.map_i2t = a.map;
  report.map_t2i = b.map;
  report.harmonic_mean = HarmonicMean(a.map, b.map);
  report.ap_i2t = std::move(a.per_query);
  report.ap_t2i = std::move(b.per_query);
  report.config = std::move(config_echo);
  return report;
}

}  // namespace hq
