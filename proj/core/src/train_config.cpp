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

#include "hq/train_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hq/error.hpp"

namespace hq {
namespace {

enum class Kind { kCount, kReal };

struct KeySpec {
  const char* key;
  const char* fallback;
  Kind kind;
};

constexpr KeySpec kKeys[] = {
    {"epochs", "50", Kind::kCount},
    {"batch_size", "64", Kind::kCount},
    {"learning_rate", "0.001", Kind::kReal},
    {"seed", "1", Kind::kCount},
    {"depth", "1", Kind::kCount},
    {"lambda_sim", "50", Kind::kReal},
    {"lambda_h", "0.01", Kind::kReal},
    {"lambda_b", "0.01", Kind::kReal},
    {"lambda_q", "0.0001", Kind::kReal},
    {"m", "4", Kind::kCount},
    {"k", "256", Kind::kCount},
    {"alternations", "10", Kind::kCount},
    {"code_dim", "0", Kind::kCount},
    {"negative_fraction", "0.7", Kind::kReal},
};

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const KeySpec* Find(std::string_view key) {
  for (const auto& spec : kKeys) {
    if (key == spec.key) return &spec;
  }
  return nullptr;
}

unsigned long long ParseCount(std::string_view key, std::string_view v) {
  unsigned long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    Throw(ErrorCode::kConfigError,
          std::string(key) + " expects a non-negative integer, got '" +
              std::string(v) + "'");
  }
  return out;
}

double ParseReal(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    Throw(ErrorCode::kConfigError,
          std::string(key) + " expects a number, got '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& spec : kKeys) entries_.emplace_back(spec.key, spec.fallback);
}

void RunConfig::Set(std::string_view key, std::string_view value) {
  const KeySpec* spec = Find(key);
  if (spec == nullptr) {
    Throw(ErrorCode::kConfigError, "unknown config key '" + std::string(key) + "'");
  }
  value = Trim(value);
  if (spec->kind == Kind::kCount) {
    ParseCount(key, value);
  } else {
    ParseReal(key, value);
  }
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == key; });
  it->second = std::string(value);
}

const std::string& RunConfig::Get(std::string_view key) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == key; });
  if (it == entries_.end()) {
    Throw(ErrorCode::kConfigError, "unknown config key '" + std::string(key) + "'");
  }
  return it->second;
}

void RunConfig::MergeText(std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Throw(ErrorCode::kConfigError,
            "line " + std::to_string(line_no) + ": expected key = value");
    }
    Set(Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void RunConfig::MergeFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIoFailure, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  MergeText(buf.str());
}

void RunConfig::MergeOverride(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    Throw(ErrorCode::kConfigError,
          "override '" + std::string(assignment) + "' is not key=value");
  }
  Set(Trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string RunConfig::Format() const {
  std::string out;
  for (const auto& [key, value] : entries_) out += key + " = " + value + "\n";
  return out;
}

TrainConfig RunConfig::ToTrainConfig() const {
  auto count = [&](const char* key) { return ParseCount(key, Get(key)); };
  TrainConfig cfg;
  cfg.epochs = count("epochs");
  cfg.batch_size = count("batch_size");
  cfg.learning_rate = ParseReal("learning_rate", Get("learning_rate"));
  cfg.seed = count("seed");
  cfg.depth = count("depth");
  cfg.num_books = count("m");
  cfg.book_size = count("k");
  cfg.alternations = count("alternations");
  cfg.code_dim = count("code_dim");
  cfg.Validate();
  return cfg;
}

LossWeights RunConfig::ToLossWeights() const {
  LossWeights w{ParseReal("lambda_sim", Get("lambda_sim")),
                ParseReal("lambda_h", Get("lambda_h")),
                ParseReal("lambda_b", Get("lambda_b")),
                ParseReal("lambda_q", Get("lambda_q"))};
  if (!(w.sim >= 0 && w.hash >= 0 && w.balance >= 0 && w.quant >= 0)) {
    Throw(ErrorCode::kConfigError, "loss weights must be >= 0");
  }
  return w;
}

double RunConfig::TargetNegativeFraction() const {
  const double v = ParseReal("negative_fraction", Get("negative_fraction"));
  Require(v >= 0.0 && v <= 1.0, ErrorCode::kConfigError,
          "negative_fraction must be in [0, 1]");
  return v;
}

}  // namespace hq
