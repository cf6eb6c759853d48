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

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "hq/hash_codec.hpp"
#include "hq/quantizer.hpp"
#include "hq/retrieval.hpp"

namespace {

constexpr std::size_t kCount = 100000;

hq::DenseFeatureMatrix Gaussian(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<float> v(count * dim);
  for (auto& x : v) x = g(rng);
  return hq::DenseFeatureMatrix(count, dim, std::move(v));
}

hq::RetrievalIndex RandomIndex(std::size_t dim, std::size_t m, std::size_t k) {
  const auto features = Gaussian(kCount, dim, dim);
  std::mt19937_64 rng(dim + m);
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<float> books(m * k * dim);
  for (auto& x : books) x = g(rng);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 1);
  std::vector<std::uint16_t> ind(kCount * m);
  for (auto& x : ind) x = static_cast<std::uint16_t>(pick(rng));
  return hq::BuildIndex(features, hq::QuantizerModel(m, k, dim, std::move(books)),
                        hq::IndicatorSet(kCount, m, k, std::move(ind)));
}

const hq::RetrievalIndex& CachedIndex(std::size_t dim) {
  static std::map<std::size_t, hq::RetrievalIndex> cache;
  auto it = cache.find(dim);
  if (it == cache.end()) it = cache.emplace(dim, RandomIndex(dim, 4, 256)).first;
  return it->second;
}

void BM_HammingScan(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto& index = CachedIndex(dim);
  const auto query = hq::SignEncode(Gaussian(1, dim, 99));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hq::HammingTopCandidates(query.code(0), index.hash_codes(), 100));
  }
  state.SetItemsProcessed(state.iterations() * kCount);
}
BENCHMARK(BM_HammingScan)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_LookupTable(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto& index = CachedIndex(dim);
  const auto query = Gaussian(1, dim, 98);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hq::BuildLookupTable(query.row(0), index.quantizer()));
  }
}
BENCHMARK(BM_LookupTable)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_FullAqd(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto& index = CachedIndex(dim);
  const auto query = Gaussian(1, dim, 97);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hq::FullAqdQuery(query.row(0), index, 50));
  }
  state.SetItemsProcessed(state.iterations() * kCount);
}
BENCHMARK(BM_FullAqd)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_TwoStage(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto candidates = static_cast<std::size_t>(state.range(1));
  const auto& index = CachedIndex(dim);
  const auto query = Gaussian(1, dim, 96);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hq::TwoStageQuery(query.row(0), index, candidates, 50));
  }
}
BENCHMARK(BM_TwoStage)
    ->ArgsProduct({{64, 128, 256, 512}, {100, 1000, 10000}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
