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

#include "hq/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "hq/binary_io.hpp"
#include "hq/cost_model.hpp"
#include "hq/csv.hpp"
#include "hq/encoder.hpp"
#include "hq/error.hpp"
#include "hq/feature_store.hpp"
#include "hq/metrics.hpp"
#include "hq/quantizer.hpp"
#include "hq/retrieval.hpp"
#include "hq/sweep.hpp"
#include "hq/train_config.hpp"
#include "hq/trainer.hpp"

namespace hq::cli {
namespace {

namespace fs = std::filesystem;

fs::path WithSuffix(const std::string& prefix, const std::string& suffix) {
  return fs::path(prefix + suffix);
}

struct DatasetFiles {
  DenseFeatureMatrix a;
  DenseFeatureMatrix b;
  LabelSet labels;
};

DatasetFiles LoadDataset(const std::string& prefix) {
  return {LoadFeatures(WithSuffix(prefix, "_a.dfm")),
          LoadFeatures(WithSuffix(prefix, "_b.dfm")),
          LoadLabels(WithSuffix(prefix, ".lbl"))};
}

void SaveDataset(const SyntheticDataset& data, const std::string& prefix) {
  SaveFeatures(data.modality_a, WithSuffix(prefix, "_a.dfm"));
  SaveFeatures(data.modality_b, WithSuffix(prefix, "_b.dfm"));
  SaveLabels(data.labels, WithSuffix(prefix, ".lbl"));
}

struct Model {
  EncoderParams encoder_a;
  EncoderParams encoder_b;
  QuantizerModel quantizer;
  std::string config;
};

Model LoadModel(const std::string& prefix) {
  Model model{LoadEncoder(WithSuffix(prefix, "_enc_a.bin")),
              LoadEncoder(WithSuffix(prefix, "_enc_b.bin")),
              LoadQuantizer(WithSuffix(prefix, ".hqq")), {}};
  const auto bytes = io::ReadFile(WithSuffix(prefix, "_config.txt"));
  model.config.assign(bytes.begin(), bytes.end());
  return model;
}

void RequireInputDim(const EncoderParams& encoder, const DenseFeatureMatrix& inputs) {
  Require(encoder.layers.front().in == inputs.dim(), ErrorCode::kDimMismatch,
          "feature dimension does not match the encoder input");
}

RetrievalIndex IndexFor(const EncoderParams& encoder, const QuantizerModel& quantizer,
                        const DenseFeatureMatrix& inputs,
                        DenseFeatureMatrix* encoded_out = nullptr) {
  RequireInputDim(encoder, inputs);
  auto encoded = EncodeMatrix(encoder, inputs);
  Require(encoded.dim() == quantizer.dim(), ErrorCode::kDimMismatch,
          "encoder output does not match the quantizer dimension");
  auto indicators = AssignIndicators(encoded, quantizer, QuantizerOptions{}.assign_rounds);
  auto index = BuildIndex(encoded, quantizer, std::move(indicators));
  if (encoded_out) *encoded_out = std::move(encoded);
  return index;
}

/// Both retrieval directions over one database / query dataset pair.
struct Tasks {
  DenseFeatureMatrix query_a, query_b, db_a, db_b;
  LabelSet query_labels, db_labels;
  std::unique_ptr<RetrievalIndex> index_a, index_b;

  RetrievalTask ImageToText() const {
    return {query_a, query_labels, *index_b, db_b, db_labels};
  }
  RetrievalTask TextToImage() const {
    return {query_b, query_labels, *index_a, db_a, db_labels};
  }
};

std::unique_ptr<Tasks> MakeTasks(const Model& model, const DatasetFiles& db,
                                 const DatasetFiles& queries) {
  Require(db.a.count() == db.labels.count() && db.b.count() == db.labels.count(),
          ErrorCode::kCountMismatch, "database features and labels disagree");
  Require(queries.a.count() == queries.labels.count() &&
              queries.b.count() == queries.labels.count(),
          ErrorCode::kCountMismatch, "query features and labels disagree");
  RequireInputDim(model.encoder_a, queries.a);
  RequireInputDim(model.encoder_b, queries.b);
  auto tasks = std::make_unique<Tasks>(Tasks{
      EncodeMatrix(model.encoder_a, queries.a), EncodeMatrix(model.encoder_b, queries.b),
      db.a, db.b, queries.labels, db.labels, nullptr, nullptr});
  tasks->index_a = std::make_unique<RetrievalIndex>(
      IndexFor(model.encoder_a, model.quantizer, db.a, &tasks->db_a));
  tasks->index_b = std::make_unique<RetrievalIndex>(
      IndexFor(model.encoder_b, model.quantizer, db.b, &tasks->db_b));
  return tasks;
}

class OutputFile {
 public:
  OutputFile(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    Require(file_.good(), ErrorCode::kIoFailure, "cannot open output file");
    stream_ = &file_;
  }
  ~OutputFile() = default;

  std::ostream& stream() { return *stream_; }
  void Close() {
    if (file_.is_open()) {
      file_.close();
      Require(!file_.fail(), ErrorCode::kIoFailure, "failed writing output file");
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      Require(used == item.size(), ErrorCode::kInvalidArgs, "bad list element");
    } catch (const std::logic_error&) {
      Throw(ErrorCode::kInvalidArgs, "bad list element '" + item + "'");
    }
  }
  Require(!values.empty(), ErrorCode::kInvalidArgs, "empty list");
  return values;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::size_t clusters = 10;
  std::size_t per_cluster = 100;
  std::size_t dim = 32;
  double sigma = 0.3;
  std::uint64_t seed = 1;
  std::size_t query_per_cluster = 0;
  std::string out;
};

void CmdSynth(const SynthArgs& a, std::ostream& out) {
  SaveDataset(SynthDataset(a.clusters, a.per_cluster, a.dim, a.sigma, a.seed), a.out);
  if (a.query_per_cluster > 0) {
    SaveDataset(SynthQueries(a.clusters, a.query_per_cluster, a.dim, a.sigma, a.seed),
                a.out + "_query");
  }
  out << "wrote " << a.clusters * a.per_cluster << " items to " << a.out << "\n";
}

struct TrainArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string data;
  std::string out;
};

void CmdTrain(const TrainArgs& a, std::ostream& out) {
  RunConfig config;
  if (!a.config_file.empty()) config.MergeFile(a.config_file);
  for (const auto& o : a.overrides) config.MergeOverride(o);
  const TrainConfig train = config.ToTrainConfig();
  const LossWeights weights = config.ToLossWeights();

  const auto data = LoadDataset(a.data);
  const auto pairs = GeneratePairs(data.labels, data.labels, train.seed,
                                   config.TargetNegativeFraction());
  const auto result = Train(data.a, data.b, pairs, train, weights);

  SaveEncoder(result.encoder_a, WithSuffix(a.out, "_enc_a.bin"));
  SaveEncoder(result.encoder_b, WithSuffix(a.out, "_enc_b.bin"));
  SaveQuantizer(result.quantizer, WithSuffix(a.out, ".hqq"));
  SaveIndicators(result.indicators_a, WithSuffix(a.out, "_ind_a.bin"));
  SaveIndicators(result.indicators_b, WithSuffix(a.out, "_ind_b.bin"));
  const std::string text = config.Format();
  io::WriteFile(WithSuffix(a.out, "_config.txt"),
                std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));

  OutputFile log(WithSuffix(a.out, "_loss.csv").string(), out);
  CsvWriter csv(log.stream(), {"epoch", "sim", "hash", "balance", "quant", "total",
                               "quant_objective"});
  for (const auto& r : result.history) {
    csv.Row(r.epoch, r.loss.sim, r.loss.hash, r.loss.balance, r.loss.quant, r.loss.total,
            r.quant_objective);
  }
  log.Close();

  const auto& first = result.history.front().loss.total;
  const auto& last = result.history.back().loss.total;
  out << text << "loss " << first << " -> " << last << " over " << train.epochs
      << " epochs (" << (last <= first ? "decreasing" : "not decreasing") << ")\n";
}

struct BuildArgs {
  std::string features;
  std::string encoder;
  std::string quantizer;
  std::string out;
};

void CmdBuild(const BuildArgs& a, std::ostream& out) {
  const auto index = IndexFor(LoadEncoder(a.encoder), LoadQuantizer(a.quantizer),
                              LoadFeatures(a.features));
  SaveIndex(index, a.out);
  out << "indexed " << index.count() << " items, "
      << IndexFileSize(index.count(), index.dim(), index.quantizer().num_books(),
                       index.quantizer().book_size())
      << " bytes\n";
}

struct QueryArgs {
  std::string queries;
  std::string encoder;
  std::string index;
  std::string mode = "two_stage";
  std::size_t candidates = 100;
  std::size_t top_k = 50;
  std::string db_features;
  std::string db_encoder;
  std::string out;
};

void CmdQuery(const QueryArgs& a, std::ostream& out) {
  const QueryMode mode = ParseQueryMode(a.mode);
  const auto encoder = LoadEncoder(a.encoder);
  const auto raw = LoadFeatures(a.queries);
  RequireInputDim(encoder, raw);
  const auto queries = EncodeMatrix(encoder, raw);
  const auto index = LoadIndex(a.index);
  Require(queries.dim() == index.dim(), ErrorCode::kDimMismatch,
          "query encoder output does not match the index dimension");

  std::optional<DenseFeatureMatrix> database;
  if (mode == QueryMode::kLossless) {
    Require(!a.db_features.empty() && !a.db_encoder.empty(), ErrorCode::kInvalidArgs,
            "lossless mode needs --db-features and --db-encoder");
    const auto db_encoder = LoadEncoder(a.db_encoder);
    const auto db_raw = LoadFeatures(a.db_features);
    RequireInputDim(db_encoder, db_raw);
    database = EncodeMatrix(db_encoder, db_raw);
    Require(database->count() == index.count(), ErrorCode::kCountMismatch,
            "database features and index disagree");
  }

  OutputFile file(a.out, out);
  CsvWriter csv(file.stream(), {"query", "rank", "item", "score"});
  for (std::size_t q = 0; q < queries.count(); ++q) {
    const auto query = queries.row(q);
    RankedResult result;
    switch (mode) {
      case QueryMode::kTwoStage:
        result = TwoStageQuery(query, index, a.candidates, a.top_k);
        break;
      case QueryMode::kFullAqd: result = FullAqdQuery(query, index, a.top_k); break;
      case QueryMode::kHashOnly: result = HashOnlyQuery(query, index, a.top_k); break;
      case QueryMode::kLossless: result = LosslessQuery(query, *database, a.top_k); break;
    }
    for (std::size_t r = 0; r < result.items.size(); ++r) {
      csv.Row(q, r + 1, result.items[r].index, result.items[r].score);
    }
  }
  file.Close();
}

struct EvalArgs {
  std::string data;
  std::string queries;
  std::string model;
  std::string mode = "two_stage";
  std::size_t candidates = 100;
  std::size_t cutoff = 50;
  std::string out;
};

std::string EvalEcho(const std::string& model_config, const EvalArgs& a) {
  std::ostringstream s;
  s << model_config << "eval.mode = " << a.mode << "\neval.candidates = " << a.candidates
    << "\neval.cutoff = " << a.cutoff << "\n";
  return s.str();
}

void CmdEval(const EvalArgs& a, std::ostream& out) {
  const QueryMode mode = ParseQueryMode(a.mode);
  const auto model = LoadModel(a.model);
  const auto tasks = MakeTasks(model, LoadDataset(a.data), LoadDataset(a.queries));
  const auto report = Evaluate(tasks->ImageToText(), tasks->TextToImage(), mode,
                               a.candidates, a.cutoff, EvalEcho(model.config, a));

  if (!a.out.empty()) {
    OutputFile file(a.out, out);
    CsvWriter csv(file.stream(), {"direction", "query", "ap"});
    for (std::size_t q = 0; q < report.ap_i2t.size(); ++q) csv.Row("i2t", q, report.ap_i2t[q]);
    for (std::size_t q = 0; q < report.ap_t2i.size(); ++q) csv.Row("t2i", q, report.ap_t2i[q]);
    file.Close();
  }
  out << report.config;
  CsvWriter summary(out, {"mode", "map_i2t", "map_t2i", "harmonic_mean"});
  summary.Row(QueryModeName(mode), report.map_i2t, report.map_t2i, report.harmonic_mean);
}

struct BenchArgs {
  std::string data;
  std::string queries;
  std::string model;
  std::string alphas = "0,0.01,0.02,0.05,0.1,0.2,0.5,1";
  std::size_t cutoff = 50;
  std::size_t repetitions = 5;
  std::string alpha_out;
  std::string dims;
  std::size_t count = 100000;
  std::size_t candidates = 100;
  std::size_t num_books = 4;
  std::size_t book_size = 256;
  std::uint64_t seed = 7;
  std::string n_out;
};

void CmdBench(const BenchArgs& a, std::ostream& out) {
  Require(!a.alpha_out.empty() || !a.n_out.empty(), ErrorCode::kInvalidArgs,
          "nothing to do: pass --alpha-out and/or --n-out");
  if (!a.alpha_out.empty()) {
    Require(!a.data.empty() && !a.queries.empty() && !a.model.empty(),
            ErrorCode::kInvalidArgs, "the alpha sweep needs --data, --queries and --model");
    const auto model = LoadModel(a.model);
    const auto tasks = MakeTasks(model, LoadDataset(a.data), LoadDataset(a.queries));
    const auto alphas = ParseList(a.alphas);
    const auto points =
        SweepAlpha(tasks->ImageToText(), tasks->TextToImage(), alphas, a.cutoff, a.repetitions);
    const auto& q = model.quantizer;
    OutputFile file(a.alpha_out, out);
    CsvWriter csv(file.stream(), {"alpha", "candidates", "map_i2t", "map_t2i",
                                  "seconds_per_query", "hq_ops", "hq_bits"});
    for (const auto& p : points) {
      const CostModel cost{tasks->index_b->count(), q.dim(), q.num_books(), q.book_size(),
                           p.candidates};
      csv.Row(p.alpha, p.candidates, p.map_i2t, p.map_t2i, p.seconds_per_query,
              p.candidates == 0 ? OpCount(cost, ModelVariant::kBinaryHash)
                                : OpCount(cost, ModelVariant::kHashQuant),
              MemoryFootprintBits(cost, ModelVariant::kHashQuant));
    }
    file.Close();
  }
  if (!a.n_out.empty()) {
    NSweepOptions options;
    if (!a.dims.empty()) {
      options.dims.clear();
      for (double d : ParseList(a.dims)) {
        Require(d >= 1 && d == static_cast<double>(static_cast<std::size_t>(d)),
                ErrorCode::kInvalidArgs, "dims must be positive integers");
        options.dims.push_back(static_cast<std::size_t>(d));
      }
    }
    options.count = a.count;
    options.candidates = a.candidates;
    options.top_k = std::min<std::size_t>(options.top_k, a.candidates);
    options.num_books = a.num_books;
    options.book_size = a.book_size;
    options.repetitions = a.repetitions;
    options.seed = a.seed;
    const auto points = SweepN(options);
    OutputFile file(a.n_out, out);
    CsvWriter csv(file.stream(),
                  {"n", "hq_bits", "quant_bits", "quant_m", "quant_k", "hq_seconds",
                   "quant_seconds", "ratio", "hq_ops", "quant_ops", "predicted_ratio"});
    for (const auto& p : points) {
      const CostModel hq{a.count, p.dim, a.num_books, a.book_size, a.candidates};
      const CostModel qo{a.count, p.dim, p.quant.num_books, p.quant.book_size, 0};
      csv.Row(p.dim, p.hq_bits, p.quant.bits, p.quant.num_books, p.quant.book_size,
              p.hq_seconds, p.quant_seconds, p.ratio, OpCount(hq, ModelVariant::kHashQuant),
              OpCount(qo, ModelVariant::kQuantization), p.predicted_ratio);
    }
    file.Close();
  }
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hashing + quantization cross-modal retrieval"};
  app.name("hq");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic two-modality dataset");
  s->add_option("--clusters", synth.clusters);
  s->add_option("--per-cluster", synth.per_cluster);
  s->add_option("--dim", synth.dim);
  s->add_option("--sigma", synth.sigma);
  s->add_option("--seed", synth.seed);
  s->add_option("--queries-per-cluster", synth.query_per_cluster,
                "Also write a held-out set to <out>_query*");
  s->add_option("--out", synth.out, "Output prefix")->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train encoders and the shared quantizer");
  t->add_option("--config", train.config_file)->check(CLI::ExistingFile);
  t->add_option("--set", train.overrides, "key=value override (repeatable)");
  t->add_option("--data", train.data, "Dataset prefix")->required();
  t->add_option("--out", train.out, "Model prefix")->required();

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build an HQX1 index");
  b->add_option("--features", build.features)->required();
  b->add_option("--encoder", build.encoder)->required();
  b->add_option("--quantizer", build.quantizer)->required();
  b->add_option("--out", build.out)->required();

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Rank an index for every query row");
  q->add_option("--queries", query.queries)->required();
  q->add_option("--encoder", query.encoder, "Query-side encoder")->required();
  q->add_option("--index", query.index)->required();
  q->add_option("--mode", query.mode, "two_stage | aqd | hash | lossless");
  q->add_option("--candidates", query.candidates);
  q->add_option("--topk", query.top_k);
  q->add_option("--db-features", query.db_features);
  q->add_option("--db-encoder", query.db_encoder);
  q->add_option("--out", query.out, "CSV path (default stdout)");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "MAP@R in both directions");
  e->add_option("--data", eval.data, "Database prefix")->required();
  e->add_option("--queries", eval.queries, "Query dataset prefix")->required();
  e->add_option("--model", eval.model)->required();
  e->add_option("--mode", eval.mode);
  e->add_option("--candidates", eval.candidates);
  e->add_option("--cutoff", eval.cutoff);
  e->add_option("--out", eval.out, "Per-query CSV");

  BenchArgs bench;
  auto* h = app.add_subcommand("bench", "Alpha and feature-length sweeps");
  h->add_option("--data", bench.data);
  h->add_option("--queries", bench.queries);
  h->add_option("--model", bench.model);
  h->add_option("--alphas", bench.alphas);
  h->add_option("--cutoff", bench.cutoff);
  h->add_option("--repetitions", bench.repetitions);
  h->add_option("--alpha-out", bench.alpha_out);
  h->add_option("--dims", bench.dims);
  h->add_option("--count", bench.count);
  h->add_option("--candidates", bench.candidates);
  h->add_option("--books", bench.num_books);
  h->add_option("--book-size", bench.book_size);
  h->add_option("--seed", bench.seed);
  h->add_option("--n-out", bench.n_out);

  std::vector<std::string> storage{"hq"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: InvalidArgs: " << ex.what() << "\n";
    return 2;
  }

  try {
    if (*s) CmdSynth(synth, out);
    if (*t) CmdTrain(train, out);
    if (*b) CmdBuild(build, out);
    if (*q) CmdQuery(query, out);
    if (*e) CmdEval(eval, out);
    if (*h) CmdBench(bench, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    err << "error: Internal: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hq::cli
