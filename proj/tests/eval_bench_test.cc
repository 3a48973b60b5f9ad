// Copyright 2026 The BranchRL Authors
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

#include "branchrl/eval_bench.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "branchrl/instance_io.h"
#include "gtest/gtest.h"

namespace branchrl {
namespace {

TEST(GeometricMeanTest, Examples) {
  EXPECT_DOUBLE_EQ(*GeometricMean(std::vector<double>{1, 4}), 2.0);
  EXPECT_DOUBLE_EQ(*GeometricMean(std::vector<double>{7, 7, 7, 7}), 7.0);
  EXPECT_NEAR(*GeometricMean(std::vector<double>{2, 8, 16}),
              std::cbrt(256.0), 1e-12);
  EXPECT_NEAR(*GeometricMean(std::vector<double>{2, 8, 16}), 6.3496, 1e-4);
}

TEST(GeometricMeanTest, Errors) {
  EXPECT_FALSE(GeometricMean(std::vector<double>{}).ok());
  EXPECT_FALSE(GeometricMean(std::vector<double>{1, 0}).ok());
  EXPECT_FALSE(GeometricMean(std::vector<double>{1, -2}).ok());
}

TEST(GeometricMeanTest, ScalesLinearly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1, 500);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(10), scaled(10);
    const double c = u(rng) / 7;
    for (int i = 0; i < 10; ++i) {
      a[i] = u(rng);
      scaled[i] = c * a[i];
    }
    EXPECT_NEAR(*GeometricMean(scaled), c * *GeometricMean(a),
                1e-12 * c * *GeometricMean(a));
  }
}

TEST(SeedStdTest, Examples) {
  EXPECT_EQ(*SeedStdPercent({{3, 3, 3}, {5, 5}}), 0.0);
  EXPECT_NEAR(*SeedStdPercent({{2, 2, 2, 2, 6}}), 100 * 1.6 / 2.8, 1e-9);
  EXPECT_NEAR(*SeedStdPercent({{2, 2, 2, 2, 6}}), 57.1, 0.05);
  // Population std / mean of {9, 11} is 10%, of {7, 13} 30%.
  EXPECT_NEAR(*SeedStdPercent({{9, 11}, {7, 13}}), 20.0, 1e-9);
}

TEST(SeedStdTest, NeedsTwoSeeds) {
  EXPECT_FALSE(SeedStdPercent({{1}, {2}}).ok());
  EXPECT_FALSE(SeedStdPercent({}).ok());
  // Short rows are skipped.
  EXPECT_NEAR(*SeedStdPercent({{4}, {9, 11}}), 10.0, 1e-9);
}

TEST(PpPointsTest, SingletonSamples) {
  const PpCurve c = *PpPoints(std::vector<double>{5}, std::vector<double>{5});
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[0], std::make_pair(0.0, 0.0));
  EXPECT_EQ(c.points[1], std::make_pair(1.0, 1.0));
}

TEST(PpPointsTest, IdenticalSamplesLieOnDiagonal) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(std::uniform_int_distribution<int>(1, 60)(rng));
    for (double& x : s) x = std::uniform_int_distribution<int>(1, 30)(rng);
    const PpCurve c = *PpPoints(s, s);
    for (const auto& [f, g] : c.points) {
      EXPECT_LE(std::abs(f - g), 1.0 / s.size());
    }
    EXPECT_EQ(c.points.back(), std::make_pair(1.0, 1.0));
  }
}

TEST(PpPointsTest, MonotoneAndEndpoints) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(35);
    for (double& x : a) x = std::uniform_int_distribution<int>(1, 100)(rng);
    for (double& x : b) x = std::uniform_int_distribution<int>(1, 100)(rng);
    const PpCurve c = *PpPoints(a, b);
    EXPECT_EQ(c.points.front(), std::make_pair(0.0, 0.0));
    EXPECT_EQ(c.points.back(), std::make_pair(1.0, 1.0));
    for (size_t k = 1; k < c.points.size(); ++k) {
      EXPECT_GE(c.points[k].first, c.points[k - 1].first);
      EXPECT_GE(c.points[k].second, c.points[k - 1].second);
    }
  }
}

// A target shifted to smaller sizes has its CDF above the reference's.
TEST(PpPointsTest, DominatingTargetIsAboveDiagonal) {
  std::mt19937_64 rng(4);
  std::vector<double> ref(40), target(40);
  for (int i = 0; i < 40; ++i) {
    ref[i] = std::uniform_int_distribution<int>(10, 200)(rng);
    target[i] = std::max(1.0, ref[i] - 7);
  }
  const PpCurve c = *PpPoints(ref, target);
  for (const auto& [f, g] : c.points) EXPECT_GE(g, f);
}

// Brute-force CDF oracle at every pooled value.
TEST(PpPointsTest, MatchesCountingOracle) {
  const std::vector<double> ref = {3, 1, 4, 1, 5};
  const std::vector<double> target = {2, 7, 1, 8};
  const PpCurve c = *PpPoints(ref, target);
  const std::vector<double> xs = {1, 2, 3, 4, 5, 7, 8};
  ASSERT_EQ(c.points.size(), xs.size() + 1);
  for (size_t k = 0; k < xs.size(); ++k) {
    const double f =
        std::count_if(ref.begin(), ref.end(), [&](double v) { return v <= xs[k]; }) /
        5.0;
    const double g = std::count_if(target.begin(), target.end(),
                                   [&](double v) { return v <= xs[k]; }) /
                     4.0;
    EXPECT_EQ(c.points[k + 1], std::make_pair(f, g));
  }
  EXPECT_FALSE(PpPoints(std::vector<double>{}, target).ok());
}

EvalConfig SmallConfig() {
  EvalConfig c;
  c.generator.set_cover_rows = 30;
  c.generator.set_cover_cols = 40;
  c.instances = 5;
  c.seeds = 2;
  return c;
}

TEST(EvaluateTest, ShapeAndRows) {
  auto report = Evaluate(SmallConfig(), {"strong", "random"}, nullptr);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->cells.size(), 20u);
  int per_rule[2] = {0, 0};
  for (const EvalCell& c : report->cells) ++per_rule[c.rule == "random"];
  EXPECT_EQ(per_rule[0], 10);
  EXPECT_EQ(per_rule[1], 10);
  ASSERT_EQ(report->summaries.size(), 2u);
  ASSERT_EQ(report->curves.size(), 2u);
  EXPECT_EQ(report->curves[0].reference, "strong");
  EXPECT_EQ(report->curves[1].target, "random");
  const std::string csv = FormatEvalResultsCsv(*report);
  std::vector<absl::string_view> lines =
      absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 21u);
  EXPECT_EQ(lines[0], "family,rule,instance,seed,tree_size,n_branched,limited");
  EXPECT_TRUE(absl::StartsWith(lines[1], "setcover,strong,0,0,"));
}

TEST(EvaluateTest, DeterministicRuleRepeatsAcrossSeeds) {
  auto report = Evaluate(SmallConfig(), {"mostfrac"}, nullptr);
  ASSERT_TRUE(report.ok());
  for (size_t k = 0; k < report->cells.size(); k += 2) {
    EXPECT_EQ(report->cells[k].tree_size, report->cells[k + 1].tree_size);
  }
  EXPECT_EQ(report->summaries[0].std_pct, 0.0);
}

TEST(EvaluateTest, SelfComparisonIsDiagonal) {
  auto report = Evaluate(SmallConfig(), {"strong", "strong"}, nullptr);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->summaries[0].geomean, report->summaries[1].geomean);
  for (const PpCurve& c : report->curves) {
    for (const auto& [f, g] : c.points) EXPECT_EQ(f, g);
  }
}

TEST(EvaluateTest, SummaryMatchesCells) {
  auto report = Evaluate(SmallConfig(), {"random"}, nullptr);
  ASSERT_TRUE(report.ok());
  std::vector<double> sizes;
  for (const EvalCell& c : report->cells) sizes.push_back(c.tree_size);
  EXPECT_DOUBLE_EQ(report->summaries[0].geomean, *GeometricMean(sizes));
  double mean = 0;
  for (double s : sizes) mean += s / sizes.size();
  EXPECT_NEAR(report->summaries[0].mean, mean, 1e-9);
}

TEST(EvaluateTest, LimitedRunsCounted) {
  EvalConfig c = SmallConfig();
  c.limits.node_limit = 3;
  auto report = Evaluate(c, {"random"}, nullptr);
  ASSERT_TRUE(report.ok());
  int limited = 0;
  for (const EvalCell& cell : report->cells) {
    limited += cell.limited;
    EXPECT_LE(cell.tree_size, 3);
  }
  EXPECT_EQ(report->summaries[0].limited_count, limited);
}

TEST(EvaluateTest, AgentNeedsNetwork) {
  EXPECT_FALSE(Evaluate(SmallConfig(), {"agent"}, nullptr).ok());
  EXPECT_FALSE(Evaluate(SmallConfig(), {"bogus"}, nullptr).ok());
  auto net = std::make_shared<const QNetwork>(InitQNetwork(1));
  EXPECT_TRUE(Evaluate(SmallConfig(), {"agent"}, net).ok());
}

TEST(EvaluateTest, JobsDoNotChangeResults) {
  EvalConfig serial = SmallConfig();
  EvalConfig parallel = serial;
  parallel.jobs = 3;
  const auto a = Evaluate(serial, {"random", "mostfrac"}, nullptr);
  const auto b = Evaluate(parallel, {"random", "mostfrac"}, nullptr);
  EXPECT_EQ(FormatEvalResultsCsv(*a), FormatEvalResultsCsv(*b));
  EXPECT_EQ(FormatSummaryCsv(*a), FormatSummaryCsv(*b));
}

TEST(EvaluateTest, WritesFiles) {
  const std::string dir = ::testing::TempDir() + "/eval_out";
  std::filesystem::remove_all(dir);
  auto report = Evaluate(SmallConfig(), {"strong", "random"}, nullptr);
  ASSERT_TRUE(WriteEvalOutputs(*report, dir).ok());
  for (const char* f : {"eval_results.csv", "summary.csv", "pp_strong.csv",
                        "pp_random.csv", "pp_setcover.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir + "/" + f)) << f;
  }
  const std::string svg = *ReadFile(dir + "/pp_setcover.svg");
  EXPECT_TRUE(absl::StartsWith(svg, "<svg"));
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 3, true);
  EXPECT_TRUE(absl::StrContains(svg, "<path"));
  const std::string summary = *ReadFile(dir + "/summary.csv");
  EXPECT_TRUE(absl::StartsWith(
      summary, "family,rule,geomean,std_pct,mean,limited_count\nsetcover,"));
}

TEST(EvaluateTest, ResultsCsvRoundTrip) {
  auto report = Evaluate(SmallConfig(), {"random", "strong"}, nullptr);
  ASSERT_TRUE(report.ok());
  auto parsed = ParseEvalResultsCsv(FormatEvalResultsCsv(*report));
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(FormatEvalResultsCsv(*parsed), FormatEvalResultsCsv(*report));
  EXPECT_EQ(FormatSummaryCsv(*parsed), FormatSummaryCsv(*report));
  ASSERT_EQ(parsed->curves.size(), report->curves.size());
  for (size_t k = 0; k < parsed->curves.size(); ++k) {
    EXPECT_EQ(FormatPpCsv(parsed->curves[k]), FormatPpCsv(report->curves[k]));
  }
  EXPECT_FALSE(ParseEvalResultsCsv("a,b\n").ok());
  EXPECT_FALSE(ParseEvalResultsCsv(
                   "family,rule,instance,seed,tree_size,n_branched,limited\n"
                   "setcover,strong,x,0,1,0,0\n")
                   .ok());
}

}  // namespace
}  // namespace branchrl
