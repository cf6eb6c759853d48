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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hq/loss.hpp"
#include "hq/trainer.hpp"

namespace hq {

/// Effective `key = value` configuration. Starts from the defaults for every
/// known key, so a formatted RunConfig is a complete record of a run.
class RunConfig {
 public:
  RunConfig();

  /// Throws ConfigError for unknown keys or unparsable values.
  void Set(std::string_view key, std::string_view value);
  const std::string& Get(std::string_view key) const;

  /// Applies `key = value` lines; `#` starts a comment, blank lines skip.
  void MergeText(std::string_view text);
  void MergeFile(const std::filesystem::path& path);
  /// Applies a `key=value` override as given on a command line.
  void MergeOverride(std::string_view assignment);

  /// One `key = value` line per key, in a fixed order.
  std::string Format() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  TrainConfig ToTrainConfig() const;
  LossWeights ToLossWeights() const;
  double TargetNegativeFraction() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace hq
