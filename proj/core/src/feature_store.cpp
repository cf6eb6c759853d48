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

#include "hq/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hq/binary_io.hpp"
#include "hq/error.hpp"

namespace hq {
namespace {

constexpr char kFeatureMagic[] = "DFM1";
constexpr char kLabelMagic[] = "LBL1";
constexpr int kMaxPairDraws = 16;
constexpr double kNegativeTolerance = 0.1;

std::uint32_t CheckedU32(std::size_t v, const char* what) {
  Require(v <= std::numeric_limits<std::uint32_t>::max(),
          ErrorCode::kInvalidArgument, what);
  return static_cast<std::uint32_t>(v);
}

std::uint64_t LowBits(std::uint32_t count) {
  return count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
}

std::mt19937_64 Stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::vector<double> Centroids(std::size_t clusters, std::size_t dim,
                              std::uint64_t seed) {
  auto rng = Stream(seed, 0);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> centroids(clusters * dim);
  for (auto& c : centroids) c = unit(rng);
  return centroids;
}

SyntheticDataset Synthesize(std::size_t clusters, std::size_t per_cluster,
                            std::size_t dim, double noise_sigma,
                            std::uint64_t seed, std::uint64_t noise_stream) {
  if (clusters > 64) {
    Throw(ErrorCode::kTooManyClusters,
          "at most 64 clusters fit in a label mask");
  }
  Require(clusters >= 1 && per_cluster >= 1 && dim >= 1,
          ErrorCode::kInvalidArgument, "empty synthetic dataset shape");
  Require(noise_sigma >= 0.0 && std::isfinite(noise_sigma),
          ErrorCode::kInvalidArgument, "noise_sigma must be finite and >= 0");

  const auto centroids = Centroids(clusters, dim, seed);
  auto rng = Stream(seed, noise_stream);
  std::normal_distribution<double> unit(0.0, 1.0);

  const std::size_t count = clusters * per_cluster;
  std::vector<float> a(count * dim);
  std::vector<float> b(count * dim);
  std::vector<std::uint64_t> masks(count);
  for (std::size_t c = 0; c < clusters; ++c) {
    for (std::size_t r = 0; r < per_cluster; ++r) {
      const std::size_t item = c * per_cluster + r;
      masks[item] = std::uint64_t{1} << c;
      for (std::size_t d = 0; d < dim; ++d) {
        const double centre = centroids[c * dim + d];
        a[item * dim + d] = static_cast<float>(centre + noise_sigma * unit(rng));
      }
      for (std::size_t d = 0; d < dim; ++d) {
        const double centre = centroids[c * dim + d];
        b[item * dim + d] = static_cast<float>(centre + noise_sigma * unit(rng));
      }
    }
  }
  return {DenseFeatureMatrix(count, dim, std::move(a)),
          DenseFeatureMatrix(count, dim, std::move(b)),
          LabelSet(static_cast<std::uint32_t>(clusters), std::move(masks))};
}

}  // namespace

DenseFeatureMatrix::DenseFeatureMatrix(std::size_t count, std::size_t dim,
                                       std::vector<float> values)
    : count_(count), dim_(dim), values_(std::move(values)) {
  Require(count_ >= 1 && dim_ >= 1, ErrorCode::kInvalidArgument,
          "feature matrix needs count >= 1 and dim >= 1");
  Require(values_.size() == count_ * dim_, ErrorCode::kInvalidArgument,
          "feature value count does not match count * dim");
  for (float v : values_) {
    if (!std::isfinite(v)) {
      Throw(ErrorCode::kNonFiniteValue, "feature matrix holds NaN or Inf");
    }
  }
}

LabelSet::LabelSet(std::uint32_t num_labels, std::vector<std::uint64_t> masks)
    : num_labels_(num_labels), masks_(std::move(masks)) {
  Require(num_labels_ >= 1 && num_labels_ <= 64, ErrorCode::kInvalidArgument,
          "label vocabulary must have 1..64 entries");
  Require(!masks_.empty(), ErrorCode::kInvalidArgument, "empty label set");
  const std::uint64_t valid = LowBits(num_labels_);
  for (std::uint64_t m : masks_) {
    Require(m != 0 && (m & ~valid) == 0, ErrorCode::kInvalidArgument,
            "label mask empty or uses bits beyond the vocabulary");
  }
}

double PairBatch::RepairedNegativeFraction() const {
  const std::size_t repaired = pairs.size() - aligned_count;
  if (repaired == 0) return 0.0;
  std::size_t negatives = 0;
  for (std::size_t p = aligned_count; p < pairs.size(); ++p) {
    negatives += pairs[p].similar == 0 ? 1 : 0;
  }
  return static_cast<double>(negatives) / static_cast<double>(repaired);
}

std::vector<std::uint8_t> EncodeFeatures(const DenseFeatureMatrix& matrix) {
  io::ByteWriter w;
  w.Magic(kFeatureMagic);
  w.U32(CheckedU32(matrix.count(), "feature count exceeds u32"));
  w.U32(CheckedU32(matrix.dim(), "feature dim exceeds u32"));
  for (float v : matrix.values()) w.F32(v);
  return w.bytes();
}

DenseFeatureMatrix DecodeFeatures(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.ExpectMagic(kFeatureMagic);
  const std::size_t count = r.U32();
  const std::size_t dim = r.U32();
  r.Need(count * dim * sizeof(float), "feature payload");
  std::vector<float> values(count * dim);
  for (auto& v : values) v = r.F32();
  return DenseFeatureMatrix(count, dim, std::move(values));
}

DenseFeatureMatrix LoadFeatures(const std::filesystem::path& path) {
  return DecodeFeatures(io::ReadFile(path));
}

void SaveFeatures(const DenseFeatureMatrix& matrix,
                  const std::filesystem::path& path) {
  io::WriteFile(path, EncodeFeatures(matrix));
}

std::vector<std::uint8_t> EncodeLabels(const LabelSet& labels) {
  io::ByteWriter w;
  w.Magic(kLabelMagic);
  w.U32(CheckedU32(labels.count(), "label count exceeds u32"));
  w.U32(labels.num_labels());
  for (std::uint64_t m : labels.masks()) w.U64(m);
  return w.bytes();
}

LabelSet DecodeLabels(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.ExpectMagic(kLabelMagic);
  const std::size_t count = r.U32();
  const std::uint32_t num_labels = r.U32();
  r.Need(count * sizeof(std::uint64_t), "label masks");
  std::vector<std::uint64_t> masks(count);
  for (auto& m : masks) m = r.U64();
  return LabelSet(num_labels, std::move(masks));
}

LabelSet LoadLabels(const std::filesystem::path& path) {
  return DecodeLabels(io::ReadFile(path));
}

void SaveLabels(const LabelSet& labels, const std::filesystem::path& path) {
  io::WriteFile(path, EncodeLabels(labels));
}

int PairLabel(const LabelSet& labels_a, const LabelSet& labels_b,
              std::size_t i, std::size_t j) {
  Require(i < labels_a.count() && j < labels_b.count(),
          ErrorCode::kIndexOutOfRange, "pair index outside label set");
  return (labels_a.mask(i) & labels_b.mask(j)) != 0 ? 1 : 0;
}

PairBatch GeneratePairs(const LabelSet& labels_a, const LabelSet& labels_b,
                        std::uint64_t shuffle_seed,
                        double target_negative_fraction) {
  Require(labels_a.count() == labels_b.count(), ErrorCode::kCountMismatch,
          "modalities must have the same item count");
  const std::size_t n = labels_a.count();

  PairBatch best;
  double best_gap = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(shuffle_seed);
  std::vector<std::uint32_t> perm(n);
  for (int draw = 0; draw < kMaxPairDraws; ++draw) {
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);

    PairBatch batch;
    batch.pairs.reserve(2 * n);
    for (std::uint32_t i = 0; i < n; ++i) {
      batch.pairs.push_back(
          {i, i, static_cast<std::uint8_t>(PairLabel(labels_a, labels_b, i, i))});
    }
    batch.aligned_count = n;
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t j = perm[i];
      batch.pairs.push_back(
          {i, j, static_cast<std::uint8_t>(PairLabel(labels_a, labels_b, i, j))});
    }

    const double gap =
        std::abs(batch.RepairedNegativeFraction() - target_negative_fraction);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(batch);
    }
    if (best_gap <= kNegativeTolerance) break;
  }
  return best;
}

SyntheticDataset SynthDataset(std::size_t clusters, std::size_t per_cluster,
                              std::size_t dim, double noise_sigma,
                              std::uint64_t seed) {
  return Synthesize(clusters, per_cluster, dim, noise_sigma, seed, 1);
}

SyntheticDataset SynthQueries(std::size_t clusters, std::size_t per_cluster,
                              std::size_t dim, double noise_sigma,
                              std::uint64_t seed) {
  return Synthesize(clusters, per_cluster, dim, noise_sigma, seed, 2);
}

DenseFeatureMatrix SelectRows(const DenseFeatureMatrix& matrix,
                              std::span<const std::size_t> indices) {
  std::vector<float> values;
  values.reserve(indices.size() * matrix.dim());
  for (std::size_t i : indices) {
    Require(i < matrix.count(), ErrorCode::kIndexOutOfRange,
            "row index outside matrix");
    const auto row = matrix.row(i);
    values.insert(values.end(), row.begin(), row.end());
  }
  return DenseFeatureMatrix(indices.size(), matrix.dim(), std::move(values));
}

}  // namespace hq
