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

#include "cli.h"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "branchrl/instance_io.h"
#include "gtest/gtest.h"

namespace branchrl::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "branchrl");
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Fresh(const std::string& name) {
  const std::string dir = ::testing::TempDir() + "/cli_" + name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string Slurp(const std::string& path) {
  auto text = ReadFile(path);
  EXPECT_TRUE(text.ok()) << path;
  return text.ok() ? *text : "";
}

// Small, fast training settings.
std::vector<std::string> TinyTrain(const std::string& out) {
  return {"train",
          "--out=" + out,
          "--seed=3",
          "--updates=40",
          "--set=setcover_rows=30",
          "--set=setcover_cols=40",
          "--set=capacity=60",
          "--set=min_fill=30",
          "--set=batch_size=8",
          "--set=target_sync=20",
          "--set=validation_period=20",
          "--set=validation_instances=2",
          "--set=episode_node_limit=60",
          "--set=validation_node_limit=200"};
}

TEST(ConfigTextTest, ParsesCommentsAndBlanks) {
  auto entries = ParseConfigText("# c\n\n a = 1 \nb=x=y\n");
  ASSERT_TRUE(entries.ok());
  ASSERT_EQ(entries->size(), 2);
  EXPECT_EQ((*entries)[0].first, "a");
  EXPECT_EQ((*entries)[0].second, "1");
  EXPECT_EQ((*entries)[1].second, "x=y");
  EXPECT_FALSE(ParseConfigText("novalue\n").ok());
}

TEST(CliTest, NoSubcommandIsUsageError) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"generate", "--bogus-flag=1"}).code, kExitUsage);
}

TEST(CliTest, GenerateWritesReadableDeterministicFiles) {
  const std::string a = Fresh("gen_a"), b = Fresh("gen_b");
  ASSERT_EQ(Cli({"generate", "--count=3", "--seed=9", "--out=" + a}).code,
            kExitOk);
  ASSERT_EQ(Cli({"generate", "--count=3", "--seed=9", "--out=" + b}).code,
            kExitOk);
  for (int i = 0; i < 3; ++i) {
    const std::string name = "/setcover_9_" + std::to_string(i) + ".milp";
    ASSERT_TRUE(ReadInstance(a + name).ok());
    EXPECT_EQ(Slurp(a + name), Slurp(b + name));
  }
  EXPECT_NE(Slurp(a + "/setcover_9_0.milp"), Slurp(a + "/setcover_9_1.milp"));
  EXPECT_TRUE(std::filesystem::exists(a + "/manifest.txt"));
}

TEST(CliTest, GenerateRejectsUnknownFamily) {
  EXPECT_EQ(Cli({"generate", "--family=bogus", "--out=" + Fresh("bad")}).code,
            kExitUsage);
  EXPECT_EQ(Cli({"generate", "--set=nonsense=1", "--out=" + Fresh("bad2")})
                .code,
            kExitUsage);
}

TEST(CliTest, SolveIntegralRootIsSingleNode) {
  const std::string dir = Fresh("solve_root");
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/one.milp";
  ASSERT_TRUE(WriteFile(path,
                        "MILP v1\nname one\nseed 0\nnvars 1\nncons 1\n"
                        "obj 1\nlb 0\nub 1\nint 1\nrow -1 1 0:-1\n")
                  .ok());
  const Outcome r = Cli({"solve", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(absl::StrContains(r.out, "tree_size 1\n")) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "objective 1\n")) << r.out;
}

TEST(CliTest, SolveExitCodes) {
  const std::string dir = Fresh("solve_codes");
  ASSERT_EQ(Cli({"generate", "--count=1", "--seed=7", "--out=" + dir}).code,
            kExitOk);
  const std::string path = dir + "/setcover_7_0.milp";
  EXPECT_EQ(Cli({"solve", path, "--rule=agent"}).code, kExitUsage);
  EXPECT_EQ(Cli({"solve", path, "--rule=nope"}).code, kExitUsage);
  EXPECT_EQ(Cli({"solve", dir + "/missing.milp"}).code, kExitUsage);
  EXPECT_EQ(Cli({"solve", path, "--rule=mostfrac", "--node-limit=3"}).code,
            kExitLimit);
  const Outcome full = Cli({"solve", path, "--rule=mostfrac",
                            "--trace=" + dir + "/trace.txt"});
  EXPECT_EQ(full.code, kExitOk) << full.err;
  EXPECT_FALSE(Slurp(dir + "/trace.txt").empty());
}

TEST(CliTest, TrainZeroUpdatesWritesInitialCheckpointOnly) {
  const std::string dir = Fresh("train_zero");
  std::vector<std::string> args = TinyTrain(dir);
  args.push_back("--updates=0");
  const Outcome r = Cli(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  int checkpoints = 0;
  for (const auto& e :
       std::filesystem::directory_iterator(dir + "/checkpoints")) {
    EXPECT_EQ(e.path().filename(), "ckpt_000000.qnet");
    ++checkpoints;
  }
  EXPECT_EQ(checkpoints, 1);
  std::vector<std::string> lines =
      absl::StrSplit(Slurp(dir + "/train_log.csv"), '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 2);
}

TEST(CliTest, TrainResumeMatchesUninterrupted) {
  const std::string whole = Fresh("train_whole"), split = Fresh("train_split");
  ASSERT_EQ(Cli(TinyTrain(whole)).code, kExitOk);
  std::vector<std::string> first = TinyTrain(split);
  first.push_back("--stop-after=25");
  ASSERT_EQ(Cli(first).code, kExitOk);
  std::vector<std::string> second = TinyTrain(split);
  second.push_back("--resume");
  const Outcome r = Cli(second);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(whole + "/train_log.csv"), Slurp(split + "/train_log.csv"));
  EXPECT_EQ(Slurp(whole + "/best.qnet"), Slurp(split + "/best.qnet"));
  // One log row per validation: updates 0, 20 and 40.
  std::vector<std::string> lines =
      absl::StrSplit(Slurp(whole + "/train_log.csv"), '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 4);
}

TEST(CliTest, TrainManifestReproducesRun) {
  const std::string a = Fresh("train_manifest_a"), b = Fresh("train_manifest_b");
  ASSERT_EQ(Cli(TinyTrain(a)).code, kExitOk);
  const Outcome r = Cli({"train", "--config=" + a + "/manifest.txt",
                         "--out=" + b});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(a + "/train_log.csv"), Slurp(b + "/train_log.csv"));
  EXPECT_EQ(Slurp(a + "/checkpoints/ckpt_000040.qnet"),
            Slurp(b + "/checkpoints/ckpt_000040.qnet"));
}

TEST(CliTest, EvaluateRowCountsAndDeterminism) {
  const std::string a = Fresh("eval_a"), b = Fresh("eval_b");
  const std::vector<std::string> base = {
      "evaluate", "--instances=5", "--seeds=2", "--set=setcover_rows=30",
      "--set=setcover_cols=40", "--node-limit=2000"};
  std::vector<std::string> args_a = base, args_b = base;
  args_a.push_back("--out=" + a);
  args_b.push_back("--out=" + b);
  args_b.push_back("--jobs=2");
  ASSERT_EQ(Cli(args_a).code, kExitOk);
  ASSERT_EQ(Cli(args_b).code, kExitOk);
  const std::string csv = Slurp(a + "/eval_results.csv");
  std::vector<std::string> lines =
      absl::StrSplit(csv, '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 1 + 3 * 5 * 2);
  for (const std::string& rule : {"strong", "mostfrac", "random"}) {
    int n = 0;
    for (const std::string& line : lines) {
      if (absl::StartsWith(line, "setcover," + rule + ",")) ++n;
    }
    EXPECT_EQ(n, 10) << rule;
  }
  EXPECT_EQ(csv, Slurp(b + "/eval_results.csv"));
  EXPECT_EQ(Slurp(a + "/summary.csv"), Slurp(b + "/summary.csv"));
  EXPECT_EQ(Slurp(a + "/pp_random.csv"), Slurp(b + "/pp_random.csv"));
}

TEST(CliTest, EvaluateAgentNeedsCheckpoint) {
  EXPECT_EQ(Cli({"evaluate", "--rule=agent", "--out=" + Fresh("eval_agent")})
                .code,
            kExitUsage);
}

TEST(CliTest, ContractionDefaultGridPasses) {
  const std::string dir = Fresh("contraction");
  const Outcome r = Cli({"contraction-check", "--draws=200", "--out=" + dir});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<std::string> lines = absl::StrSplit(
      Slurp(dir + "/contraction.csv"), '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 1 + 4 * 4);
  for (size_t k = 1; k < lines.size(); ++k) {
    std::vector<std::string> f = absl::StrSplit(lines[k], ',');
    ASSERT_EQ(f.size(), 9);
    EXPECT_NE(f[8], "FAIL") << lines[k];
    EXPECT_EQ(f[7], "0") << lines[k];
    if (f[0] == "0") EXPECT_EQ(f[4], "0.000000") << lines[k];
  }
  EXPECT_EQ(Cli({"contraction", "--gammas=1.5", "--out=" + dir}).code,
            kExitUsage);
}

TEST(CliTest, ConfigFileYieldsToFlags) {
  const std::string dir = Fresh("config");
  std::filesystem::create_directories(dir);
  const std::string cfg = dir + "/run.cfg";
  ASSERT_TRUE(WriteFile(cfg,
                        "# generator settings\ncount=2\nseed=5\n"
                        "setcover_rows=20\nsetcover_cols=25\n")
                  .ok());
  ASSERT_EQ(Cli({"generate", "--config=" + cfg, "--out=" + dir + "/a"}).code,
            kExitOk);
  EXPECT_TRUE(std::filesystem::exists(dir + "/a/setcover_5_1.milp"));
  EXPECT_FALSE(std::filesystem::exists(dir + "/a/setcover_5_2.milp"));
  auto inst = ReadInstance(dir + "/a/setcover_5_0.milp");
  ASSERT_TRUE(inst.ok());
  EXPECT_EQ(inst->rows.size(), 20);

  // Flags win over the file wherever they appear.
  ASSERT_EQ(Cli({"generate", "--count=3", "--config", cfg,
                 "--out=" + dir + "/b"})
                .code,
            kExitOk);
  EXPECT_TRUE(std::filesystem::exists(dir + "/b/setcover_5_2.milp"));

  // The manifest reproduces the run.
  ASSERT_EQ(Cli({"generate", "--config=" + dir + "/a/manifest.txt",
                 "--out=" + dir + "/c"})
                .code,
            kExitOk);
  EXPECT_EQ(Slurp(dir + "/a/setcover_5_1.milp"),
            Slurp(dir + "/c/setcover_5_1.milp"));

  ASSERT_TRUE(WriteFile(cfg, "frobnicate=1\n").ok());
  EXPECT_EQ(Cli({"contraction", "--config=" + cfg}).code, kExitUsage);
}

TEST(CliTest, PlotRedrawsFromResults) {
  const std::string dir = Fresh("plot");
  ASSERT_EQ(Cli({"evaluate", "--instances=3", "--seeds=2",
                 "--set=setcover_rows=30", "--set=setcover_cols=40",
                 "--out=" + dir})
                .code,
            kExitOk);
  const std::string summary = Slurp(dir + "/summary.csv");
  std::filesystem::remove(dir + "/summary.csv");
  ASSERT_EQ(Cli({"plot", "--input=" + dir}).code, kExitOk);
  EXPECT_EQ(Slurp(dir + "/summary.csv"), summary);
  EXPECT_EQ(Cli({"plot", "--input=" + Fresh("plot_empty")}).code, kExitUsage);
}

}  // namespace
}  // namespace branchrl::cli
