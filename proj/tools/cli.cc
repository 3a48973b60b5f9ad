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

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "branchrl/agent_rule.h"
#include "branchrl/bellman_lab.h"
#include "branchrl/bnb.h"
#include "branchrl/branching.h"
#include "branchrl/eval_bench.h"
#include "branchrl/generators.h"
#include "branchrl/instance_io.h"
#include "branchrl/qnetwork.h"
#include "branchrl/seeds.h"
#include "branchrl/status_macros.h"
#include "branchrl/trainer.h"
#include "branchrl/version.h"

namespace branchrl::cli {
namespace {

constexpr uint64_t kGenerateStream = 5;

// A usage problem detected after parsing (bad family, missing checkpoint).
absl::Status Usage(absl::string_view message) {
  return absl::InvalidArgumentError(message);
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
      return kExitUsage;
    case absl::StatusCode::kResourceExhausted:
      return kExitLimit;
    case absl::StatusCode::kInternal:
      return kExitNumerical;
    default:
      return kExitFailure;
  }
}

std::string DefaultOutRoot() {
  const char* env = std::getenv("BRANCHRL_OUT");
  return env != nullptr && *env != '\0' ? env : "runs";
}

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm;
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

bool IsGeneratorKey(absl::string_view key) {
  for (absl::string_view prefix :
       {"setcover_", "auction_", "indset_", "facility_", "knapsack_"}) {
    if (absl::StartsWith(key, prefix)) return true;
  }
  return false;
}

// Values shared by several subcommands.
struct Common {
  std::string config;
  std::string out;
  uint64_t seed = 0;
  int jobs = 1;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* sub, Common* c, bool with_sets) {
  sub->add_option("--config", c->config,
                  "key=value file; command-line flags take precedence");
  sub->add_option("--out", c->out, "output directory");
  sub->add_option("--seed", c->seed, "run seed");
  sub->add_option("--jobs", c->jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  if (with_sets) {
    sub->add_option("--set", c->sets,
                    "extra option key=value (repeatable), e.g. "
                    "setcover_rows=50")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  }
}

// Applies --family and every --set to a training config.
absl::Status ApplySets(const std::string& family,
                       const std::vector<std::string>& sets,
                       TrainConfig* config) {
  if (!family.empty()) RETURN_IF_ERROR(SetTrainOption(config, "family", family));
  for (const std::string& s : sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos) {
      return Usage(absl::StrCat("--set expects key=value, got '", s, "'"));
    }
    RETURN_IF_ERROR(SetTrainOption(config, s.substr(0, eq), s.substr(eq + 1)));
  }
  return absl::OkStatus();
}

// Resolved options of `sub` as key=value lines, then `extra`.
std::string ManifestText(const CLI::App* sub, const std::string& extra) {
  std::string out = absl::StrCat(
      "# run manifest; usable as --config to reproduce this run\n",
      "# subcommand: ", sub->get_name(), "\n# code_version: ", CodeVersion(),
      "\n# started: ", UtcNow(), "\n");
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (opt->get_lnames().empty() || name == "help" || name == "config" ||
        name == "set") {
      continue;
    }
    std::string value;
    if (opt->get_items_expected_max() == 0) {
      value = opt->as<bool>() ? "true" : "false";
    } else if (opt->count() > 0) {
      value = absl::StrJoin(opt->results(), ",");
    } else {
      value = opt->get_default_str();
    }
    absl::StrAppend(&out, name, "=", value, "\n");
  }
  absl::StrAppend(&out, extra);
  return out;
}

absl::Status PrepareOut(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::InternalError(absl::StrCat(dir, ": ", ec.message()));
  return absl::OkStatus();
}

absl::Status WriteManifest(const CLI::App* sub, const std::string& dir,
                           const std::string& extra = "") {
  RETURN_IF_ERROR(PrepareOut(dir));
  return WriteFile(dir + "/manifest.txt", ManifestText(sub, extra));
}

std::string TrainExtra(const TrainConfig& config, const CLI::App* sub) {
  std::string out;
  for (absl::string_view line :
       absl::StrSplit(FormatTrainConfig(config), '\n', absl::SkipEmpty())) {
    const std::string key(line.substr(0, line.find('=')));
    if (sub->get_option_no_throw("--" + key) == nullptr) {
      absl::StrAppend(&out, line, "\n");
    }
  }
  return out;
}

std::string GeneratorExtra(const TrainConfig& config) {
  std::string out;
  for (absl::string_view line :
       absl::StrSplit(FormatTrainConfig(config), '\n', absl::SkipEmpty())) {
    if (IsGeneratorKey(line.substr(0, line.find('=')))) {
      absl::StrAppend(&out, line, "\n");
    }
  }
  return out;
}

absl::StatusOr<std::shared_ptr<const QNetwork>> LoadAgent(
    const std::vector<std::string>& rules, const std::string& checkpoint) {
  bool wants = false;
  for (const std::string& r : rules) wants = wants || r == "agent";
  if (!wants) return std::shared_ptr<const QNetwork>();
  if (checkpoint.empty()) return Usage("rule 'agent' needs --checkpoint");
  ASSIGN_OR_RETURN(QNetwork net, LoadQNetwork(checkpoint));
  return std::make_shared<const QNetwork>(std::move(net));
}

absl::StatusOr<std::vector<double>> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  for (absl::string_view token : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    auto v = ParseDouble(absl::StripAsciiWhitespace(token));
    if (!v.ok()) return Usage(absl::StrCat("bad number '", token, "'"));
    out.push_back(*v);
  }
  if (out.empty()) return Usage("empty list");
  return out;
}

// ------------------------------------------------------------ subcommands

struct GenerateArgs {
  Common common;
  std::string family = "setcover";
  int count = 10;
};

absl::Status RunGenerate(const CLI::App* sub, const GenerateArgs& a,
                         std::ostream& out) {
  TrainConfig config;
  RETURN_IF_ERROR(ApplySets(a.family, a.common.sets, &config));
  const std::string dir =
      a.common.out.empty() ? DefaultOutRoot() + "/instances" : a.common.out;
  RETURN_IF_ERROR(WriteManifest(sub, dir, GeneratorExtra(config)));
  const std::string family(FamilyName(config.generator.family));
  for (int i = 0; i < a.count; ++i) {
    ASSIGN_OR_RETURN(
        MilpInstance inst,
        Generate(config.generator, DeriveSeed(a.common.seed, kGenerateStream, i)));
    RETURN_IF_ERROR(WriteInstance(
        inst, absl::StrCat(dir, "/", family, "_", a.common.seed, "_", i,
                           ".milp")));
  }
  out << "wrote " << a.count << " " << family << " instances to " << dir
      << "\n";
  return absl::OkStatus();
}

struct SolveArgs {
  Common common;
  std::string instance;
  std::string rule = "strong";
  std::string selector = "bestbound";
  int64_t node_limit = 1'000'000;
  std::string checkpoint;
  std::string trace;
};

absl::Status RunSolve(const CLI::App* sub, const SolveArgs& a,
                      std::ostream& out) {
  ASSIGN_OR_RETURN(NodeSelection selection, ParseNodeSelection(a.selector));
  std::unique_ptr<BranchingRule> rule;
  if (a.rule == "agent") {
    ASSIGN_OR_RETURN(auto net, LoadAgent({"agent"}, a.checkpoint));
    rule = std::make_unique<AgentRule>(net);
  } else {
    ASSIGN_OR_RETURN(rule, MakeClassicRule(a.rule));
  }
  if (!a.common.out.empty()) RETURN_IF_ERROR(WriteManifest(sub, a.common.out));
  auto inst = ReadInstance(a.instance);
  if (!inst.ok()) {
    return absl::Status(inst.status().code() == absl::StatusCode::kNotFound
                            ? absl::StatusCode::kInvalidArgument
                            : inst.status().code(),
                        inst.status().message());
  }
  Limits limits;
  limits.node_limit = a.node_limit;
  ASSIGN_OR_RETURN(SolveResult r,
                   Solve(*inst, *rule, selection, limits, a.common.seed));
  const bool limited = r.status == SolveStatus::kNodeLimit;
  std::string text = absl::StrCat(
      "status ", limited ? "node_limit" : "optimal", "\n",
      "objective ", FormatDouble(r.best_objective), "\n",
      "tree_size ", r.tree_size, "\n", "n_branched ", r.n_branched, "\n");
  for (int s = 0; s < kNumNodeStatuses; ++s) {
    absl::StrAppend(&text, "nodes_", NodeStatusName(static_cast<NodeStatus>(s)),
                    " ", r.fathom_counts[s], "\n");
  }
  out << text;
  if (!a.common.out.empty()) {
    RETURN_IF_ERROR(WriteFile(a.common.out + "/solve_result.txt", text));
  }
  if (!a.trace.empty()) RETURN_IF_ERROR(WriteFile(a.trace, FormatTrace(r.trace)));
  if (limited) return absl::ResourceExhaustedError("node limit reached");
  return absl::OkStatus();
}

struct TrainArgs {
  Common common;
  std::string family = "setcover";
  std::string loss = "msle";
  std::string preset = "desk";
  int64_t updates = -1;  // -1: preset value
  bool resume = false;
  int64_t stop_after = -1;
};

absl::StatusOr<TrainConfig> BuildTrainConfig(const TrainArgs& a) {
  TrainConfig config;
  if (a.preset == "desk") {
    config = TrainConfig::DeskScale();
  } else if (a.preset != "full") {
    return Usage("--preset must be desk or full");
  }
  RETURN_IF_ERROR(ApplySets(a.family, a.common.sets, &config));
  RETURN_IF_ERROR(SetTrainOption(&config, "loss", a.loss));
  if (a.updates >= 0) config.total_updates = a.updates;
  RETURN_IF_ERROR(config.Validate());
  return config;
}

absl::Status RunTrain(const CLI::App* sub, const TrainArgs& a,
                      std::ostream& out) {
  ASSIGN_OR_RETURN(TrainConfig config, BuildTrainConfig(a));
  const std::string dir =
      a.common.out.empty() ? DefaultOutRoot() + "/train" : a.common.out;
  std::unique_ptr<Trainer> trainer;
  if (a.resume) {
    ASSIGN_OR_RETURN(trainer, Trainer::Resume(config, a.common.seed, dir));
    out << "resuming at update " << trainer->updates() << "\n";
  } else {
    RETURN_IF_ERROR(WriteManifest(sub, dir, TrainExtra(config, sub)));
    trainer = std::make_unique<Trainer>(config, a.common.seed, dir);
  }
  std::optional<int64_t> stop;
  if (a.stop_after >= 0) stop = a.stop_after;
  RETURN_IF_ERROR(trainer->Run(stop));
  if (trainer->updates() < config.total_updates) {
    out << "stopped at update " << trainer->updates() << "; state in " << dir
        << "/train_state.txt\n";
    return absl::OkStatus();
  }
  const TrainLogRow best = *trainer->best();
  out << "updates " << trainer->updates() << " episodes "
      << trainer->episodes() << "\n"
      << absl::StrFormat("best update %d val_geomean %.4f\n", best.update,
                         best.val_geomean)
      << "log " << dir << "/train_log.csv\n";
  return absl::OkStatus();
}

struct EvalArgs {
  Common common;
  std::string family = "setcover";
  std::string rules = "strong,mostfrac,random";
  std::string checkpoint;
  std::string selector = "bestbound";
  int instances = 40;
  int seeds = 5;
  int64_t node_limit = 20'000;
};

absl::StatusOr<EvalConfig> BuildEvalConfig(const EvalArgs& a) {
  TrainConfig tc;
  RETURN_IF_ERROR(ApplySets(a.family, a.common.sets, &tc));
  EvalConfig config;
  config.generator = tc.generator;
  config.instances = a.instances;
  config.seeds = a.seeds;
  config.limits.node_limit = a.node_limit;
  ASSIGN_OR_RETURN(config.selection, ParseNodeSelection(a.selector));
  config.instance_seed_base = kEvaluationSeedBase + a.common.seed * 100'000;
  config.jobs = a.common.jobs;
  return config;
}

void PrintSummary(const EvalReport& report, std::ostream& out) {
  out << absl::StrFormat("%-10s %10s %9s %10s %8s\n", "rule", "geomean",
                         "std%", "mean", "limited");
  for (const RuleSummary& s : report.summaries) {
    out << absl::StrFormat("%-10s %10.3f %9.2f %10.3f %8d\n", s.rule,
                           s.geomean, s.std_pct, s.mean, s.limited_count);
  }
}

absl::Status RunEvaluate(const CLI::App* sub, const EvalArgs& a,
                         std::ostream& out) {
  ASSIGN_OR_RETURN(EvalConfig config, BuildEvalConfig(a));
  std::vector<std::string> rules =
      absl::StrSplit(a.rules, ',', absl::SkipEmpty());
  if (rules.empty()) return Usage("--rule needs at least one rule");
  for (const std::string& r : rules) {
    if (r != "agent" && !MakeClassicRule(r).ok()) {
      return Usage(absl::StrCat("unknown rule '", r, "'"));
    }
  }
  ASSIGN_OR_RETURN(auto agent, LoadAgent(rules, a.checkpoint));
  const std::string dir =
      a.common.out.empty() ? DefaultOutRoot() + "/evaluate" : a.common.out;
  TrainConfig tc;
  tc.generator = config.generator;
  RETURN_IF_ERROR(WriteManifest(sub, dir, GeneratorExtra(tc)));
  ASSIGN_OR_RETURN(EvalReport report, Evaluate(config, rules, agent));
  RETURN_IF_ERROR(WriteEvalOutputs(report, dir));
  PrintSummary(report, out);
  return absl::OkStatus();
}

struct ContractionArgs {
  Common common;
  std::string gammas = "0,0.5,0.9,1";
  std::string probs = "0,0.2,0.3,0.4";
  int draws = 1000;
  int states = kDefaultStates;
};

absl::Status RunContraction(const CLI::App* sub, const ContractionArgs& a,
                            std::ostream& out) {
  EnsembleConfig config;
  ASSIGN_OR_RETURN(config.gammas, ParseDoubleList(a.gammas));
  ASSIGN_OR_RETURN(config.probabilities, ParseDoubleList(a.probs));
  for (double g : config.gammas) {
    if (g < 0 || g > 1) return Usage("gamma must lie in [0, 1]");
  }
  for (double p : config.probabilities) {
    if (p < 0 || p > 1) return Usage("probabilities must lie in [0, 1]");
  }
  config.draws = a.draws;
  config.states = a.states;
  config.seed = a.common.seed;
  const std::string dir =
      a.common.out.empty() ? DefaultOutRoot() + "/contraction" : a.common.out;
  RETURN_IF_ERROR(WriteManifest(sub, dir));
  const std::vector<EnsembleCell> cells = RunEnsemble(config);
  const std::string csv = FormatEnsembleCsv(cells);
  RETURN_IF_ERROR(WriteFile(dir + "/contraction.csv", csv));
  out << csv;
  for (const EnsembleCell& c : cells) {
    if (c.flagged() || c.bound_violations > 0) {
      return absl::FailedPreconditionError("a contracting cell failed");
    }
  }
  return absl::OkStatus();
}

struct AblationArgs {
  TrainArgs train;
  EvalArgs eval;
};

absl::Status RunAblation(const CLI::App* sub, AblationArgs a,
                         std::ostream& out) {
  const std::string dir =
      a.train.common.out.empty() ? DefaultOutRoot() + "/ablation"
                                 : a.train.common.out;
  a.eval.common = a.train.common;
  a.eval.family = a.train.family;
  a.eval.rules = "agent";
  ASSIGN_OR_RETURN(TrainConfig base, BuildTrainConfig(a.train));
  ASSIGN_OR_RETURN(EvalConfig eval, BuildEvalConfig(a.eval));
  eval.instance_seed_base = kEvaluationSeedBase;
  RETURN_IF_ERROR(WriteManifest(sub, dir, TrainExtra(base, sub)));

  std::string csv =
      "family,loss,best_update,best_val_geomean,eval_geomean,eval_std_pct,"
      "eval_mean,eval_limited\n";
  for (LossMode mode : {LossMode::kMsle, LossMode::kMse}) {
    TrainConfig config = base;
    config.loss = mode;
    const std::string run_dir = dir + "/" + LossModeName(mode);
    Trainer trainer(config, a.train.common.seed, run_dir);
    RETURN_IF_ERROR(trainer.Run());
    const TrainLogRow best = *trainer.best();
    ASSIGN_OR_RETURN(QNetwork net, LoadQNetwork(run_dir + "/best.qnet"));
    ASSIGN_OR_RETURN(
        EvalReport report,
        Evaluate(eval, {"agent"},
                 std::make_shared<const QNetwork>(std::move(net))));
    RETURN_IF_ERROR(WriteEvalOutputs(report, run_dir + "/eval"));
    const RuleSummary& s = report.summaries[0];
    absl::StrAppend(
        &csv, FamilyName(config.generator.family), ",", LossModeName(mode),
        ",", best.update, ",",
        absl::StrFormat("%.6f,%.6f,%.4f,%.6f", best.val_geomean, s.geomean,
                        s.std_pct, s.mean),
        ",", s.limited_count, "\n");
  }
  RETURN_IF_ERROR(WriteFile(dir + "/ablation.csv", csv));
  out << csv;
  return absl::OkStatus();
}

struct PlotArgs {
  Common common;
  std::string input;
};

absl::Status RunPlot(const CLI::App* sub, const PlotArgs& a,
                     std::ostream& out) {
  const std::string dir = a.common.out.empty() ? a.input : a.common.out;
  bool any = false;
  const std::string eval_path = a.input + "/eval_results.csv";
  if (std::filesystem::exists(eval_path)) {
    ASSIGN_OR_RETURN(std::string text, ReadFile(eval_path));
    ASSIGN_OR_RETURN(EvalReport report, ParseEvalResultsCsv(text));
    RETURN_IF_ERROR(WriteManifest(sub, dir));
    RETURN_IF_ERROR(WriteEvalOutputs(report, dir));
    PrintSummary(report, out);
    any = true;
  }
  const std::string log_path = a.input + "/train_log.csv";
  if (std::filesystem::exists(log_path)) {
    ASSIGN_OR_RETURN(std::string text, ReadFile(log_path));
    std::vector<std::pair<double, double>> points;
    std::vector<absl::string_view> lines =
        absl::StrSplit(text, '\n', absl::SkipEmpty());
    for (size_t k = 1; k < lines.size(); ++k) {
      std::vector<absl::string_view> f = absl::StrSplit(lines[k], ',');
      double x = 0, y = 0;
      if (f.size() != 6 || !absl::SimpleAtod(f[0], &x) ||
          !absl::SimpleAtod(f[4], &y)) {
        return Usage(absl::StrCat("bad train_log line ", k + 1));
      }
      points.emplace_back(x, y);
    }
    if (!any) RETURN_IF_ERROR(WriteManifest(sub, dir));
    RETURN_IF_ERROR(WriteFile(
        dir + "/train_curve.svg",
        RenderLineSvg(points, "validation tree size", "update",
                      "geomean")));
    out << "wrote " << dir << "/train_curve.svg\n";
    any = true;
  }
  if (!any) {
    return Usage(absl::StrCat("no eval_results.csv or train_log.csv in ",
                              a.input));
  }
  return absl::OkStatus();
}

// Rewrites args so config-file entries come right after the subcommand, where
// any later command-line flag overrides them.
absl::StatusOr<std::vector<std::string>> ExpandConfig(
    const std::vector<std::string>& args, CLI::App& app) {
  if (args.size() < 2) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[1]);
  if (sub == nullptr) return args;
  std::string path;
  for (size_t k = 2; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (absl::StartsWith(args[k], "--config=")) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  auto text = ReadFile(path);
  if (!text.ok()) return Usage(text.status().message());
  ASSIGN_OR_RETURN(auto entries, ParseConfigText(*text));
  std::vector<std::string> out = {args[0], args[1]};
  for (const auto& [key, value] : entries) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (sub->get_option_no_throw("--" + flag) != nullptr) {
      out.push_back(absl::StrCat("--", flag, "=", value));
    } else if (sub->get_option_no_throw("--set") != nullptr) {
      out.push_back(absl::StrCat("--set=", key, "=", value));
    } else {
      return Usage(absl::StrCat("unknown config key '", key, "' for ",
                                args[1]));
    }
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

absl::StatusOr<std::vector<std::pair<std::string, std::string>>>
ParseConfigText(absl::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos || eq == 0) {
      return Usage(absl::StrCat("config line ", line_no, ": expected key=value"));
    }
    out.emplace_back(
        std::string(absl::StripAsciiWhitespace(line.substr(0, eq))),
        std::string(absl::StripAsciiWhitespace(line.substr(eq + 1))));
  }
  return out;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Learned branching for mixed-integer programs"};
  app.set_version_flag("--version", std::string(CodeVersion()));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write random instances");
  AddCommon(gen_cmd, &gen.common, true);
  gen_cmd->add_option("--family", gen.family, "instance family");
  gen_cmd->add_option("--count", gen.count, "number of instances")
      ->check(CLI::NonNegativeNumber);

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "branch and bound");
  AddCommon(solve_cmd, &solve.common, false);
  solve_cmd->add_option("instance,--instance", solve.instance, "instance file")
      ->required();
  solve_cmd->add_option("--rule", solve.rule, "strong|mostfrac|random|agent");
  solve_cmd->add_option("--selector", solve.selector, "dfs|bestbound");
  solve_cmd->add_option("--node-limit", solve.node_limit, "tree size limit")
      ->check(CLI::Range(int64_t{3}, std::numeric_limits<int64_t>::max()));
  solve_cmd->add_option("--checkpoint", solve.checkpoint, "network for agent");
  solve_cmd->add_option("--trace", solve.trace, "write the event trace here");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "train a branching agent");
  AddCommon(train_cmd, &train.common, true);
  train_cmd->add_option("--family", train.family, "instance family");
  train_cmd->add_option("--loss", train.loss, "msle|mse");
  train_cmd->add_option("--updates", train.updates,
                        "gradient updates (-1: preset value)");
  train_cmd->add_option("--preset", train.preset, "desk|full");
  train_cmd->add_flag("--resume", train.resume,
                      "continue from train_state.txt in --out");
  train_cmd->add_option("--stop-after", train.stop_after,
                        "save state and stop after this many updates");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "compare rules");
  AddCommon(eval_cmd, &eval.common, true);
  eval_cmd->add_option("--family", eval.family, "instance family");
  eval_cmd->add_option("--rule", eval.rules, "comma-separated rules");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "network for agent");
  eval_cmd->add_option("--selector", eval.selector, "dfs|bestbound");
  eval_cmd->add_option("--instances", eval.instances, "instances")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seeds", eval.seeds, "seeds per instance")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--node-limit", eval.node_limit, "tree size limit")
      ->check(CLI::Range(int64_t{3}, std::numeric_limits<int64_t>::max()));

  ContractionArgs con;
  CLI::App* con_cmd = app.add_subcommand(
      "contraction", "tree Bellman operator contraction ensemble");
  con_cmd->alias("contraction-check");
  AddCommon(con_cmd, &con.common, false);
  con_cmd->add_option("--gammas", con.gammas, "comma-separated discounts");
  con_cmd->add_option("--probs", con.probs,
                      "comma-separated child probabilities (p+ = p-)");
  con_cmd->add_option("--draws", con.draws, "draws per cell")
      ->check(CLI::PositiveNumber);
  con_cmd->add_option("--states", con.states, "states per MDP")
      ->check(CLI::PositiveNumber);

  AblationArgs abl;
  CLI::App* abl_cmd =
      app.add_subcommand("ablation", "train with msle and mse, then compare");
  AddCommon(abl_cmd, &abl.train.common, true);
  abl_cmd->add_option("--family", abl.train.family, "instance family");
  abl_cmd->add_option("--updates", abl.train.updates,
                      "gradient updates per run (-1: preset value)");
  abl_cmd->add_option("--preset", abl.train.preset, "desk|full");
  abl_cmd->add_option("--selector", abl.eval.selector, "dfs|bestbound");
  abl_cmd->add_option("--instances", abl.eval.instances, "instances")
      ->check(CLI::PositiveNumber);
  abl_cmd->add_option("--seeds", abl.eval.seeds, "seeds per instance")
      ->check(CLI::PositiveNumber);
  abl_cmd->add_option("--node-limit", abl.eval.node_limit, "tree size limit")
      ->check(CLI::Range(int64_t{3}, std::numeric_limits<int64_t>::max()));

  PlotArgs plot;
  CLI::App* plot_cmd =
      app.add_subcommand("plot", "redraw P-P and training curves");
  AddCommon(plot_cmd, &plot.common, false);
  plot_cmd->add_option("--input", plot.input,
                       "directory with eval_results.csv or train_log.csv")
      ->required();

  auto expanded = ExpandConfig(args, app);
  if (!expanded.ok()) {
    err << "error: " << expanded.status().message() << "\n";
    return kExitUsage;
  }
  std::vector<const char*> argv;
  for (const std::string& a : *expanded) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  absl::Status status;
  if (gen_cmd->parsed()) {
    status = RunGenerate(gen_cmd, gen, out);
  } else if (solve_cmd->parsed()) {
    status = RunSolve(solve_cmd, solve, out);
  } else if (train_cmd->parsed()) {
    status = RunTrain(train_cmd, train, out);
  } else if (eval_cmd->parsed()) {
    status = RunEvaluate(eval_cmd, eval, out);
  } else if (con_cmd->parsed()) {
    status = RunContraction(con_cmd, con, out);
  } else if (abl_cmd->parsed()) {
    status = RunAblation(abl_cmd, abl, out);
  } else if (plot_cmd->parsed()) {
    status = RunPlot(plot_cmd, plot, out);
  }
  if (!status.ok()) {
    err << "error: " << status.message() << "\n";
  }
  return ExitCodeFor(status);
}

}  // namespace branchrl::cli
