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
#include <filesystem>
#include <span>
#include <vector>

namespace hq {

/// N x n row-major matrix of finite 32-bit features for one modality.
class DenseFeatureMatrix {
 public:
  /// Throws InvalidArgument for an empty shape or a size mismatch and
  /// NonFiniteValue if any entry is NaN or infinite.
  DenseFeatureMatrix(std::size_t count, std::size_t dim,
                     std::vector<float> values);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const float> values() const { return values_; }

  bool operator==(const DenseFeatureMatrix&) const = default;

 private:
  std::size_t count_;
  std::size_t dim_;
  std::vector<float> values_;
};

/// Per-item multi-label ground truth, one 64-bit mask per item.
class LabelSet {
 public:
  LabelSet(std::uint32_t num_labels, std::vector<std::uint64_t> masks);

  std::size_t count() const { return masks_.size(); }
  std::uint32_t num_labels() const { return num_labels_; }
  std::uint64_t mask(std::size_t i) const { return masks_[i]; }
  std::span<const std::uint64_t> masks() const { return masks_; }

  bool operator==(const LabelSet&) const = default;

 private:
  std::uint32_t num_labels_;
  std::vector<std::uint64_t> masks_;
};

struct TrainingPair {
  std::uint32_t index_a;
  std::uint32_t index_b;
  std::uint8_t similar;

  bool operator==(const TrainingPair&) const = default;
};

struct PairBatch {
  std::vector<TrainingPair> pairs;
  /// Number of leading entries that are aligned (i, i) pairs; the rest are
  /// re-paired through the shuffle permutation.
  std::size_t aligned_count = 0;

  /// Fraction of dissimilar pairs among the re-paired entries only.
  double RepairedNegativeFraction() const;
};

DenseFeatureMatrix LoadFeatures(const std::filesystem::path& path);
void SaveFeatures(const DenseFeatureMatrix& matrix,
                  const std::filesystem::path& path);
std::vector<std::uint8_t> EncodeFeatures(const DenseFeatureMatrix& matrix);
DenseFeatureMatrix DecodeFeatures(std::span<const std::uint8_t> bytes);

LabelSet LoadLabels(const std::filesystem::path& path);
void SaveLabels(const LabelSet& labels, const std::filesystem::path& path);
std::vector<std::uint8_t> EncodeLabels(const LabelSet& labels);
LabelSet DecodeLabels(std::span<const std::uint8_t> bytes);

/// 1 iff the two items share at least one label.
int PairLabel(const LabelSet& labels_a, const LabelSet& labels_b,
              std::size_t i, std::size_t j);

/// Emits the N aligned pairs (i, i) followed by N re-paired pairs (i, p(i))
/// for a seeded permutation p. The permutation is re-drawn (at most 16
/// draws) until the negative fraction among re-paired pairs lies within
/// 0.1 of `target_negative_fraction`; otherwise the closest draw is kept.
PairBatch GeneratePairs(const LabelSet& labels_a, const LabelSet& labels_b,
                        std::uint64_t shuffle_seed,
                        double target_negative_fraction);

struct SyntheticDataset {
  DenseFeatureMatrix modality_a;
  DenseFeatureMatrix modality_b;
  LabelSet labels;
};

/// Isotropic Gaussian clusters: centroids ~ N(0, I); each modality of an
/// item is an independent N(0, noise_sigma^2 I) perturbation of its
/// cluster centroid. Items are laid out cluster-major and item c*per+r
/// carries the single label bit c.
SyntheticDataset SynthDataset(std::size_t clusters, std::size_t per_cluster,
                              std::size_t dim, double noise_sigma,
                              std::uint64_t seed);

/// Same centroids as SynthDataset(clusters, ..., seed) but a fresh noise
/// stream, for held-out query sets.
SyntheticDataset SynthQueries(std::size_t clusters, std::size_t per_cluster,
                              std::size_t dim, double noise_sigma,
                              std::uint64_t seed);

/// Rows `indices` of `matrix`, in that order.
DenseFeatureMatrix SelectRows(const DenseFeatureMatrix& matrix,
                              std::span<const std::size_t> indices);

}  // namespace hq
