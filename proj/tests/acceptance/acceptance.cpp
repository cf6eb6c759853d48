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

// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_check.hpp"
#include "hq/cost_model.hpp"
#include "hq/error.hpp"
#include "hq/feature_store.hpp"
#include "hq/hash_codec.hpp"
#include "hq/metrics.hpp"
#include "hq/quantizer.hpp"
#include "hq/retrieval.hpp"
#include "hq/sweep.hpp"
#include "hq/trainer.hpp"
#include "oracles.hpp"

namespace hq {
namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Verdict()> run;
};

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict HammingEuclidean() {
  std::mt19937_64 rng(101);
  std::bernoulli_distribution coin;
  std::size_t bad = 0, total = 0;
  for (std::size_t n : {16, 64, 128, 130}) {
    std::vector<float> v(2000 * n);
    for (auto& x : v) x = coin(rng) ? 1.0f : -1.0f;
    const DenseFeatureMatrix h(2000, n, std::move(v));
    const auto codes = SignEncode(h);
    for (std::size_t p = 0; p < 1000; ++p) {
      const auto a = h.row(2 * p), b = h.row(2 * p + 1);
      long long sq = 0;
      for (std::size_t d = 0; d < n; ++d) {
        const long long diff = static_cast<long long>(a[d]) - static_cast<long long>(b[d]);
        sq += diff * diff;
      }
      bad += sq != 4 * static_cast<long long>(HammingDistance(codes.code(2 * p), codes.code(2 * p + 1)));
      ++total;
    }
  }
  return {bad == 0, Fmt("%zu/%zu pairs exact", total - bad, total)};
}

Verdict AqdErrorBound() {
  const auto data = SynthDataset(10, 100, 32, 0.3, 202);
  const auto queries = SynthQueries(10, 10, 32, 0.3, 202);
  const auto fit = LearnQuantizer(data.modality_a, data.modality_b, 4, 16, 10, 202);
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> pick_q(0, 99), pick_i(0, 999);
  std::size_t bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto q = queries.modality_a.row(pick_q(rng));
    const std::size_t i = pick_i(rng);
    const auto f = data.modality_a.row(i);
    const auto idx = fit.indicators_a.item(i);
    const double aqd = Aqd(BuildLookupTable(q, fit.model), idx);
    const double exact = oracle::Dot(q, f);
    const double bound = std::sqrt(oracle::Dot(q, q)) *
                         std::sqrt(oracle::SquaredResidual(f, fit.model, idx)) * (1 + 1e-6);
    const double err = std::abs(aqd - exact);
    bad += err > bound;
    if (bound > 0) worst = std::max(worst, err / bound);
  }
  return {bad == 0, Fmt("violations %zu/1000, max error/bound %.4f", bad, worst)};
}

Verdict CodebookOptimality() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t bad = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const auto f = oracle::RandomMatrix(100, 8, rng);
    const auto ind = oracle::RandomIndicators(100, 1, 4, rng);
    const auto q = UpdateCodebooks(f, ind, 1e-8);
    const double base = oracle::NaiveObjective(f, q, ind);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> delta(q.codebooks().size());
      double norm = 0.0;
      for (auto& d : delta) {
        d = g(rng);
        norm += d * d;
      }
      std::vector<float> moved(q.codebooks().begin(), q.codebooks().end());
      for (std::size_t i = 0; i < moved.size(); ++i) {
        moved[i] += static_cast<float>(1e-2 * delta[i] / std::sqrt(norm));
      }
      bad += oracle::NaiveObjective(f, QuantizerModel(1, 4, 8, moved), ind) < base;
    }
  }
  return {bad == 0, Fmt("%zu/2000 perturbations beat the closed form", bad)};
}

Verdict IndicatorOracle() {
  std::mt19937_64 rng(404);
  std::size_t single_bad = 0, joint_opt = 0, regressions = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto q = oracle::RandomQuantizer(1, 8, 6, rng);
    const auto f = oracle::RandomMatrix(20, 6, rng);
    const auto ind = AssignIndicators(f, q, 3);
    for (std::size_t i = 0; i < 20; ++i) {
      std::vector<std::uint16_t> best;
      oracle::ExhaustiveBest(f.row(i), q, &best);
      single_bad += ind.item(i)[0] != best[0];
    }
  }
  for (int inst = 0; inst < 50; ++inst) {
    const auto q = oracle::RandomQuantizer(2, 3, 4, rng);
    const auto f = oracle::RandomMatrix(1, 4, rng);
    const auto prev = oracle::RandomIndicators(1, 2, 3, rng);
    const auto ind = AssignIndicators(f, q, prev, 3);
    const double got = oracle::SquaredResidual(f.row(0), q, ind.item(0));
    joint_opt += got <= oracle::ExhaustiveBest(f.row(0), q) + 1e-9;
    regressions += got > oracle::SquaredResidual(f.row(0), q, prev.item(0));
  }
  const bool pass = single_bad == 0 && joint_opt >= 40 && regressions == 0;
  return {pass, Fmt("m=1 mismatches %zu; m=2 optimal on %zu/50, regressions %zu",
                    single_bad, joint_opt, regressions)};
}

Verdict GradientChecks() {
  double worst = 0.0;
  for (int term = 0; term < 5; ++term) {
    for (std::size_t depth : {1, 2}) {
      std::mt19937_64 rng(500 + term * 10 + depth);
      LossWeights w{0, 0, 0, 0};
      switch (term) {
        case 0: w.sim = 1; break;
        case 1: w.hash = 1; break;
        case 2: w.balance = 1; break;
        case 3: w.quant = 1; break;
        default: w = LossWeights{}; break;
      }
      for (int config = 0; config < 20; ++config) {
        auto s = testing::SmoothSetup(rng, depth);
        worst = std::max(worst, testing::MaxGradientError(s, w));
      }
    }
  }
  return {worst <= 1e-4, Fmt("max relative error %.3g over 200 configurations", worst)};
}

Verdict EndpointIdentities() {
  const auto data = SynthDataset(5, 100, 32, 1.5, 606);
  const auto q = SynthQueries(5, 10, 32, 1.5, 606);
  const auto fit = LearnQuantizer(data.modality_a, data.modality_b, 4, 16, 5, 606);
  const auto ia = BuildIndex(data.modality_a, fit.model, fit.indicators_a);
  const auto ib = BuildIndex(data.modality_b, fit.model, fit.indicators_b);
  std::size_t mismatches = 0;
  for (std::size_t r = 0; r < q.modality_a.count(); ++r) {
    mismatches += TwoStageQuery(q.modality_a.row(r), ib, 500, 500) !=
                  FullAqdQuery(q.modality_a.row(r), ib, 500);
  }
  const RetrievalTask i2t{q.modality_a, q.labels, ib, data.modality_b, data.labels};
  const RetrievalTask t2i{q.modality_b, q.labels, ia, data.modality_a, data.labels};
  const std::vector<double> alphas{0.0};
  const auto p = SweepAlpha(i2t, t2i, alphas, 50, 1).front();
  const double h1 = MapAt(i2t, QueryMode::kHashOnly, 0, 50).map;
  const double h2 = MapAt(t2i, QueryMode::kHashOnly, 0, 50).map;
  const bool pass = mismatches == 0 && p.map_i2t == h1 && p.map_t2i == h2;
  return {pass, Fmt("ranking mismatches %zu/50; alpha=0 MAP %.6f/%.6f vs hash %.6f/%.6f",
                    mismatches, p.map_i2t, p.map_t2i, h1, h2)};
}

Verdict MemoryAndOpAccounting() {
  struct Row {
    CostModel c;
    std::uint64_t lossless, quant, hash, hq, ops_hash, ops_quant, ops_hq;
  };
  const std::vector<Row> rows{
      {{10, 16, 2, 4, 3}, 5120, 4136, 160, 4296, 160, 148, 294},
      {{1000, 128, 4, 256, 100}, 4096000, 4226304, 128000, 4354304, 128000, 135072, 259472},
      {{100000, 512, 8, 16, 1000}, 1638400000, 5297152, 51200000, 56497152, 51200000, 865536, 51273536},
      {{100000, 128, 4, 256, 100}, 409600000, 7394304, 12800000, 20194304, 12800000, 531072, 12931472},
  };
  std::size_t bad = 0;
  for (const auto& r : rows) {
    bad += MemoryFootprintBits(r.c, ModelVariant::kLossless) != r.lossless;
    bad += MemoryFootprintBits(r.c, ModelVariant::kQuantization) != r.quant;
    bad += MemoryFootprintBits(r.c, ModelVariant::kBinaryHash) != r.hash;
    bad += MemoryFootprintBits(r.c, ModelVariant::kHashQuant) != r.hq;
    bad += OpCount(r.c, ModelVariant::kLossless) != r.ops_hash;
    bad += OpCount(r.c, ModelVariant::kBinaryHash) != r.ops_hash;
    bad += OpCount(r.c, ModelVariant::kQuantization) != r.ops_quant;
    bad += OpCount(r.c, ModelVariant::kHashQuant) != r.ops_hq;
  }
  return {bad == 0, Fmt("%zu/%zu formula values differ", bad, rows.size() * 8)};
}

Verdict EfficiencyClaim() {
  const NSweepOptions options;
  const auto points = SweepN(options);
  std::vector<double> dims, ratios, predicted;
  std::ostringstream s;
  bool faster_at_128 = false, budget_ok = true;
  for (const auto& p : points) {
    dims.push_back(static_cast<double>(p.dim));
    ratios.push_back(p.ratio);
    predicted.push_back(p.predicted_ratio);
    if (p.dim == 128) faster_at_128 = p.hq_seconds < p.quant_seconds;
    budget_ok = budget_ok && std::abs(double(p.quant.bits) - double(p.hq_bits)) <= 0.05 * double(p.hq_bits);
    s << Fmt("n=%zu m2=%llu k2=%llu ratio=%.2f; ", p.dim,
             static_cast<unsigned long long>(p.quant.num_books),
             static_cast<unsigned long long>(p.quant.book_size), p.ratio);
  }
  const double rho = SpearmanCorrelation(dims, ratios);
  const double rho_model = SpearmanCorrelation(predicted, ratios);
  s << Fmt("HQ faster at n=128: %s; spearman(n, ratio)=%.2f; spearman(predicted, measured)=%.2f",
           faster_at_128 ? "yes" : "no", rho, rho_model);
  return {faster_at_128 && budget_ok && rho > 0.9, s.str()};
}

Verdict DeskScaleQuality() {
  const auto data = SynthDataset(10, 500, 32, 0.3, 909);
  const auto queries = SynthQueries(10, 20, 32, 0.3, 909);
  const auto pairs = GeneratePairs(data.labels, data.labels, 909, 0.7);
  TrainConfig config;
  config.epochs = 50;
  config.alternations = 1;
  config.seed = 909;
  const auto model = Train(data.modality_a, data.modality_b, pairs, config, LossWeights{});

  const auto db_a = EncodeMatrix(model.encoder_a, data.modality_a);
  const auto db_b = EncodeMatrix(model.encoder_b, data.modality_b);
  const auto q_a = EncodeMatrix(model.encoder_a, queries.modality_a);
  const auto q_b = EncodeMatrix(model.encoder_b, queries.modality_b);
  const auto index_a = BuildIndex(db_a, model.quantizer, model.indicators_a);
  const auto index_b = BuildIndex(db_b, model.quantizer, model.indicators_b);
  const RetrievalTask i2t{q_a, queries.labels, index_b, db_b, data.labels};
  const RetrievalTask t2i{q_b, queries.labels, index_a, db_a, data.labels};

  auto both = [&](QueryMode mode, std::size_t candidates) {
    return std::pair{MapAt(i2t, mode, candidates, 50).map, MapAt(t2i, mode, candidates, 50).map};
  };
  const auto hq = both(QueryMode::kTwoStage, 100);
  const auto lossless = both(QueryMode::kLossless, 0);
  const auto hash = both(QueryMode::kHashOnly, 0);
  const bool pass = hq.first >= 0.9 * lossless.first && hq.second >= 0.9 * lossless.second &&
                    hq.first >= hash.first - 0.02 && hq.second >= hash.second - 0.02;
  return {pass, Fmt("MAP@50 i2t/t2i: HQ %.4f/%.4f, lossless %.4f/%.4f, hash %.4f/%.4f",
                    hq.first, hq.second, lossless.first, lossless.second, hash.first,
                    hash.second)};
}

Verdict MapOracle() {
  std::vector<float> v;
  std::vector<std::uint64_t> masks;
  for (int i = 0; i < 20; ++i) {
    const double t = i * std::acos(-1.0) / 40.0;
    v.push_back(static_cast<float>(std::cos(t)));
    v.push_back(static_cast<float>(std::sin(t)));
    masks.push_back(i % 3 == 0 || i == 7 ? 1u : 2u);
  }
  const DenseFeatureMatrix db(20, 2, v);
  const LabelSet db_labels(2, masks);
  const auto index = BuildIndex(db, QuantizerModel(1, 1, 2, {1, 1}),
                                IndicatorSet(20, 1, 1, std::vector<std::uint16_t>(20, 0)));
  const DenseFeatureMatrix queries(3, 2, {1, 0, 0, 1, 1, 1});
  const LabelSet query_labels(2, {1, 2, 1});
  const RetrievalTask task{queries, query_labels, index, db, db_labels};
  double worst = 0.0;
  for (std::size_t cutoff : {5, 10, 20}) {
    const auto got = MapAt(task, QueryMode::kLossless, 0, cutoff);
    double literal = 0.0;
    for (std::size_t q = 0; q < 3; ++q) {
      std::vector<std::uint32_t> ranked;
      for (const auto& s : LosslessQuery(queries.row(q), db, 20).items) ranked.push_back(s.index);
      literal += oracle::LiteralAp(ranked, RelevantItems(task, q), cutoff) / 3.0;
    }
    worst = std::max(worst, std::abs(got.map - literal));
  }
  const double h = HarmonicMean(0.542, 0.493);
  return {worst <= 1e-12 && std::abs(h - 0.516) <= 1e-3,
          Fmt("max |map - literal| %.2g; harmonic_mean(0.542, 0.493)=%.4f", worst, h)};
}

Verdict Serialization() {
  std::mt19937_64 rng(1111);
  const auto f = oracle::RandomMatrix(37, 130, rng);
  std::vector<std::uint64_t> masks(37);
  for (auto& m : masks) m = rng() & 0xFFFF;
  const LabelSet labels(16, masks);
  const auto q = oracle::RandomQuantizer(3, 16, 130, rng);
  const auto index = BuildIndex(f, q, AssignIndicators(f, q, 3));

  const auto fb = EncodeFeatures(f);
  const auto lb = EncodeLabels(labels);
  const auto ib = EncodeIndex(index);
  bool ok = EncodeFeatures(DecodeFeatures(fb)) == fb && DecodeFeatures(fb) == f &&
            EncodeLabels(DecodeLabels(lb)) == lb && DecodeLabels(lb) == labels &&
            EncodeIndex(DecodeIndex(ib)) == ib && DecodeIndex(ib) == index;

  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgs;
  };
  std::size_t wrong = 0;
  for (const auto* bytes : {&fb, &lb, &ib}) {
    auto bad = *bytes;
    bad[0] ^= 0xFF;
    auto cut = *bytes;
    cut.resize(cut.size() - 3);
    auto decode = [&](const std::vector<std::uint8_t>& b) {
      if (bytes == &fb) DecodeFeatures(b);
      else if (bytes == &lb) DecodeLabels(b);
      else DecodeIndex(b);
    };
    wrong += code_of([&] { decode(bad); }) != ErrorCode::kBadMagic;
    wrong += code_of([&] { decode(cut); }) != ErrorCode::kTruncatedFile;
  }
  return {ok && wrong == 0, Fmt("round trips %s; %zu/6 corruption cases misreported",
                                ok ? "bit-exact" : "differ", wrong)};
}

}  // namespace
}  // namespace hq

int main() {
  using namespace hq;
  const std::vector<Criterion> criteria{
      {1, "hamming-euclidean identity", 1, HammingEuclidean},
      {2, "aqd error bound", 5, AqdErrorBound},
      {3, "closed-form codebook optimality", 5, CodebookOptimality},
      {4, "indicator oracle equivalence", 10, IndicatorOracle},
      {5, "gradient checks", 30, GradientChecks},
      {6, "two-stage endpoint identities", 5, EndpointIdentities},
      {7, "memory and op accounting", 1, MemoryAndOpAccounting},
      {8, "equal-memory efficiency", 300, EfficiencyClaim},
      {9, "desk-scale retrieval quality", 300, DeskScaleQuality},
      {10, "map oracle", 1, MapOracle},
      {11, "serialization", 1, Serialization},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c.budget_seconds;
    const bool pass = v.pass && in_budget;
    failures += !pass;
    std::printf("%s %d %s (%.2fs of %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_seconds, in_budget ? "" : ", over budget", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
