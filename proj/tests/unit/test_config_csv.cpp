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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "error_code.hpp"
#include "hq/csv.hpp"
#include "hq/train_config.hpp"
#include "temp_dir.hpp"

namespace hq {
namespace {

using testing::CodeOf;

TEST(RunConfig, DefaultsCoverEveryKey) {
  const RunConfig c;
  EXPECT_EQ(c.Get("epochs"), "50");
  EXPECT_EQ(c.Get("lambda_sim"), "50");
  EXPECT_EQ(c.Get("lambda_q"), "0.0001");
  EXPECT_EQ(c.Get("m"), "4");
  EXPECT_EQ(c.Get("k"), "256");
  const auto w = c.ToLossWeights();
  EXPECT_EQ(w.sim, 50.0);
  EXPECT_EQ(w.hash, 0.01);
  EXPECT_EQ(w.balance, 0.01);
  EXPECT_EQ(w.quant, 0.0001);
  const auto t = c.ToTrainConfig();
  EXPECT_EQ(t.epochs, 50u);
  EXPECT_EQ(t.num_books, 4u);
  EXPECT_EQ(t.book_size, 256u);
  EXPECT_DOUBLE_EQ(c.TargetNegativeFraction(), 0.7);
  for (const char* key : {"epochs", "batch_size", "learning_rate", "seed", "depth", "lambda_sim",
                          "lambda_h", "lambda_b", "lambda_q", "m", "k", "alternations"}) {
    EXPECT_NO_THROW(c.Get(key)) << key;
  }
}

TEST(RunConfig, FileCommentsAndOverrides) {
  RunConfig c;
  c.MergeText("# header\n\nepochs = 3   # trailing\n  lambda_h=0.5\r\nk = 16\n");
  c.MergeOverride("epochs=7");
  EXPECT_EQ(c.Get("epochs"), "7");
  EXPECT_EQ(c.Get("lambda_h"), "0.5");
  const auto t = c.ToTrainConfig();
  EXPECT_EQ(t.epochs, 7u);
  EXPECT_EQ(t.book_size, 16u);
  EXPECT_EQ(c.ToLossWeights().hash, 0.5);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_EQ(CodeOf([&] { c.Set("epoch", "1"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.Set("epochs", "-1"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.Set("epochs", "1.5"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.Set("lambda_h", "abc"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.Set("lambda_h", "nan"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.MergeText("epochs 3\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.MergeOverride("epochs"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { c.Get("nope"); }), ErrorCode::kConfigError);
  c.Set("batch_size", "0");
  EXPECT_EQ(CodeOf([&] { c.ToTrainConfig(); }), ErrorCode::kConfigError);
  c.Set("batch_size", "4");
  c.Set("lambda_b", "-1");
  EXPECT_EQ(CodeOf([&] { c.ToLossWeights(); }), ErrorCode::kConfigError);
  c.Set("negative_fraction", "1.5");
  EXPECT_EQ(CodeOf([&] { c.TargetNegativeFraction(); }), ErrorCode::kConfigError);
}

TEST(RunConfig, FormatRoundTrips) {
  RunConfig c;
  c.Set("seed", "42");
  c.Set("learning_rate", "0.25");
  const std::string text = c.Format();
  EXPECT_EQ(text.substr(0, text.find('\n')), "epochs = 50");
  RunConfig d;
  d.MergeText(text);
  EXPECT_EQ(d.Format(), text);
  EXPECT_EQ(d.entries(), c.entries());
}

TEST(RunConfig, MergeFile) {
  testing::TempDir dir("cfg");
  std::ofstream(dir / "c.txt") << "alternations = 2\n";
  RunConfig c;
  c.MergeFile(dir / "c.txt");
  EXPECT_EQ(c.ToTrainConfig().alternations, 2u);
  EXPECT_EQ(CodeOf([&] { c.MergeFile(dir / "missing.txt"); }), ErrorCode::kIoFailure);
}

TEST(CsvWriter, HeaderQuotingAndPrecision) {
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b", "c"});
  csv.Row(1, std::string("x,y"), 0.1);
  csv.Row("say \"hi\"", 2u, -3.5);
  EXPECT_EQ(out.str(), "a,b,c\n1,\"x,y\",0.10000000000000001\n\"say \"\"hi\"\"\",2,-3.5\n");
  EXPECT_EQ(CodeOf([&] { csv.Row(1, 2); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(csv.columns(), 3u);
}

TEST(CsvWriter, DoublesRoundTrip) {
  std::ostringstream out;
  CsvWriter csv(out, {"v"});
  const double v = 1.0 / 3.0;
  csv.Row(v);
  const std::string s = out.str();
  EXPECT_EQ(std::stod(s.substr(2)), v);
}

}  // namespace
}  // namespace hq
