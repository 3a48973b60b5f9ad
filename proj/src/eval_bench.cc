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
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <thread>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "branchrl/agent_rule.h"
#include "branchrl/branching.h"
#include "branchrl/instance_io.h"
#include "branchrl/status_macros.h"

namespace branchrl {

absl::StatusOr<double> GeometricMean(std::span<const double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("geometric mean of an empty sample");
  }
  double sum_log = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("geometric mean needs positive values, got ", v));
    }
    sum_log += std::log(v);
  }
  return std::exp(sum_log / values.size());
}

absl::StatusOr<double> SeedStdPercent(
    const std::vector<std::vector<double>>& per_instance) {
  double total = 0.0;
  int used = 0;
  for (const auto& row : per_instance) {
    if (row.size() < 2) continue;
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= row.size();
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= row.size();
    total += std::sqrt(var) / mean;
    ++used;
  }
  if (used == 0) {
    return absl::InvalidArgumentError("seed std needs two seeds per instance");
  }
  return 100.0 * total / used;
}

absl::StatusOr<PpCurve> PpPoints(std::span<const double> reference,
                                 std::span<const double> target) {
  if (reference.empty() || target.empty()) {
    return absl::InvalidArgumentError("P-P curve of an empty sample");
  }
  std::vector<double> ref(reference.begin(), reference.end());
  std::vector<double> tgt(target.begin(), target.end());
  std::sort(ref.begin(), ref.end());
  std::sort(tgt.begin(), tgt.end());
  std::vector<double> support(ref);
  support.insert(support.end(), tgt.begin(), tgt.end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  PpCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  for (double x : support) {
    // Empirical CDF: fraction of the sample <= x.
    const auto f = [x](const std::vector<double>& s) {
      return static_cast<double>(
                 std::upper_bound(s.begin(), s.end(), x) - s.begin()) /
             s.size();
    };
    curve.points.emplace_back(f(ref), f(tgt));
  }
  return curve;
}

namespace {

absl::StatusOr<std::unique_ptr<BranchingRule>> MakeRule(
    const std::string& name, const std::shared_ptr<const QNetwork>& agent) {
  if (name == "agent") {
    if (agent == nullptr) {
      return absl::InvalidArgumentError("rule 'agent' needs a checkpoint");
    }
    return std::make_unique<AgentRule>(agent);
  }
  return MakeClassicRule(name);
}

}  // namespace

absl::StatusOr<EvalReport> Evaluate(const EvalConfig& config,
                                    const std::vector<std::string>& rules,
                                    std::shared_ptr<const QNetwork> agent) {
  if (rules.empty()) return absl::InvalidArgumentError("no rules to evaluate");
  if (config.instances < 1 || config.seeds < 1) {
    return absl::InvalidArgumentError("need at least one instance and seed");
  }
  const int n_inst = config.instances;
  const int n_seeds = config.seeds;

  std::vector<MilpInstance> instances;
  instances.reserve(n_inst);
  for (int i = 0; i < n_inst; ++i) {
    ASSIGN_OR_RETURN(MilpInstance inst,
                     Generate(config.generator, config.instance_seed_base + i));
    instances.push_back(std::move(inst));
  }

  // One job per (rule, instance, seed) that actually needs solving.
  struct Job {
    int rule, instance, seed;
  };
  std::vector<Job> jobs;
  std::vector<bool> stochastic(rules.size());
  for (size_t r = 0; r < rules.size(); ++r) {
    ASSIGN_OR_RETURN(auto probe, MakeRule(rules[r], agent));
    stochastic[r] = probe->stochastic();
    for (int i = 0; i < n_inst; ++i) {
      for (int k = 0; k < (stochastic[r] ? n_seeds : 1); ++k) {
        jobs.push_back({static_cast<int>(r), i, k});
      }
    }
  }

  std::vector<absl::StatusOr<SolveResult>> results(
      jobs.size(), absl::UnknownError("not run"));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      auto rule = MakeRule(rules[job.rule], agent);
      if (!rule.ok()) {
        results[j] = rule.status();
        continue;
      }
      results[j] = Solve(instances[job.instance], **rule, config.selection,
                         config.limits, static_cast<uint64_t>(job.seed));
    }
  };
  const int n_threads = std::max(1, std::min<int>(config.jobs, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& r : results) RETURN_IF_ERROR(r.status());

  std::vector<EvalCell> cells;
  size_t j = 0;
  for (size_t r = 0; r < rules.size(); ++r) {
    for (int i = 0; i < n_inst; ++i) {
      const size_t first = j;
      j += stochastic[r] ? n_seeds : 1;
      for (int k = 0; k < n_seeds; ++k) {
        const SolveResult& res = *results[stochastic[r] ? first + k : first];
        EvalCell cell;
        cell.rule = rules[r];
        cell.instance = i;
        cell.seed = k;
        cell.tree_size = res.tree_size;
        cell.n_branched = res.n_branched;
        cell.limited = res.status == SolveStatus::kNodeLimit;
        cells.push_back(cell);
      }
    }
  }
  return Summarize(std::string(FamilyName(config.generator.family)),
                   std::move(cells), rules);
}

absl::StatusOr<EvalReport> Summarize(std::string family,
                                     std::vector<EvalCell> cells,
                                     const std::vector<std::string>& rules) {
  EvalReport report;
  report.family = std::move(family);
  report.cells = std::move(cells);
  std::vector<std::vector<double>> samples(rules.size());
  for (size_t r = 0; r < rules.size(); ++r) {
    RuleSummary summary;
    summary.rule = rules[r];
    std::map<int, std::vector<double>> per_instance;
    for (const EvalCell& cell : report.cells) {
      if (cell.rule != rules[r]) continue;
      if (cell.limited) {
        ++summary.limited_count;
        continue;
      }
      per_instance[cell.instance].push_back(
          static_cast<double>(cell.tree_size));
      samples[r].push_back(static_cast<double>(cell.tree_size));
    }
    if (!samples[r].empty()) {
      ASSIGN_OR_RETURN(summary.geomean, GeometricMean(samples[r]));
      double sum = 0.0;
      for (double v : samples[r]) sum += v;
      summary.mean = sum / samples[r].size();
    } else {
      summary.geomean = summary.mean = std::nan("");
    }
    std::vector<std::vector<double>> rows;
    for (auto& [instance, sizes] : per_instance) rows.push_back(sizes);
    auto std_pct = SeedStdPercent(rows);
    summary.std_pct = std_pct.ok() ? *std_pct : 0.0;
    report.summaries.push_back(summary);
  }

  size_t ref = 0;
  for (size_t r = 0; r < rules.size(); ++r) {
    if (rules[r] == "strong") {
      ref = r;
      break;
    }
  }
  for (size_t r = 0; r < rules.size(); ++r) {
    if (samples[ref].empty() || samples[r].empty()) continue;
    ASSIGN_OR_RETURN(PpCurve curve, PpPoints(samples[ref], samples[r]));
    curve.reference = rules[ref];
    curve.target = rules[r];
    report.curves.push_back(std::move(curve));
  }
  return report;
}

absl::StatusOr<EvalReport> ParseEvalResultsCsv(absl::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.empty() ||
      lines[0] != "family,rule,instance,seed,tree_size,n_branched,limited") {
    return absl::InvalidArgumentError("not an eval_results.csv file");
  }
  std::string family;
  std::vector<std::string> rules;
  std::vector<EvalCell> cells;
  for (size_t k = 1; k < lines.size(); ++k) {
    std::vector<std::string> f = absl::StrSplit(lines[k], ',');
    EvalCell cell;
    int limited = 0;
    if (f.size() != 7 || !absl::SimpleAtoi(f[2], &cell.instance) ||
        !absl::SimpleAtoi(f[3], &cell.seed) ||
        !absl::SimpleAtoi(f[4], &cell.tree_size) ||
        !absl::SimpleAtoi(f[5], &cell.n_branched) ||
        !absl::SimpleAtoi(f[6], &limited)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad eval_results line ", k + 1));
    }
    if (family.empty()) family = f[0];
    if (f[0] != family) {
      return absl::InvalidArgumentError("eval_results mixes families");
    }
    cell.rule = f[1];
    cell.limited = limited != 0;
    if (std::find(rules.begin(), rules.end(), cell.rule) == rules.end()) {
      rules.push_back(cell.rule);
    }
    cells.push_back(std::move(cell));
  }
  return Summarize(family, std::move(cells), rules);
}

std::string FormatEvalResultsCsv(const EvalReport& report) {
  std::string out = "family,rule,instance,seed,tree_size,n_branched,limited\n";
  for (const EvalCell& c : report.cells) {
    absl::StrAppend(&out, report.family, ",", c.rule, ",", c.instance, ",",
                    c.seed, ",", c.tree_size, ",", c.n_branched, ",",
                    c.limited ? 1 : 0, "\n");
  }
  return out;
}

std::string FormatSummaryCsv(const EvalReport& report) {
  std::string out = "family,rule,geomean,std_pct,mean,limited_count\n";
  for (const RuleSummary& s : report.summaries) {
    absl::StrAppend(&out, report.family, ",", s.rule, ",",
                    absl::StrFormat("%.6f,%.4f,%.6f", s.geomean, s.std_pct,
                                    s.mean),
                    ",", s.limited_count, "\n");
  }
  return out;
}

std::string FormatPpCsv(const PpCurve& curve) {
  std::string out = absl::StrCat("F_", curve.reference, ",F_", curve.target,
                                 "\n");
  for (const auto& [f, g] : curve.points) {
    absl::StrAppend(&out, FormatDouble(f), ",", FormatDouble(g), "\n");
  }
  return out;
}

std::string RenderPpSvg(const std::vector<PpCurve>& curves,
                        const std::string& title) {
  constexpr int kSize = 400, kPad = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#9467bd", "#ff7f0e", "#8c564b"};
  const auto px = [](double u) { return kPad + u * kSize; };
  const auto py = [](double v) { return kPad + (1.0 - v) * kSize; };
  std::string svg = absl::StrFormat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\">\n"
      "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
      "<text x=\"%d\" y=\"30\" font-family=\"sans-serif\" "
      "font-size=\"14\">%s</text>\n"
      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
      "stroke=\"black\"/>\n"
      "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"gray\" "
      "stroke-dasharray=\"4\"/>\n",
      kSize + 2 * kPad + 120, kSize + 2 * kPad, kPad, title, kPad, kPad, kSize,
      kSize, kPad, kPad + kSize, kPad + kSize, kPad);
  if (!curves.empty()) {
    absl::StrAppend(
        &svg,
        absl::StrFormat("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                        "font-size=\"12\" text-anchor=\"middle\">CDF %s</text>\n",
                        kPad + kSize / 2, kSize + kPad + 35,
                        curves[0].reference));
  }
  for (size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    std::string path;
    for (size_t k = 0; k < curves[c].points.size(); ++k) {
      const auto& [f, g] = curves[c].points[k];
      absl::StrAppend(&path, k == 0 ? "M" : " L",
                      absl::StrFormat("%.2f %.2f", px(f), py(g)));
    }
    absl::StrAppend(
        &svg,
        absl::StrFormat("<path d=\"%s\" fill=\"none\" stroke=\"%s\" "
                        "stroke-width=\"1.5\"/>\n",
                        path, color),
        absl::StrFormat("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                        "font-size=\"12\" fill=\"%s\">%s</text>\n",
                        kSize + kPad + 10, kPad + 15 + 18 * static_cast<int>(c),
                        color, curves[c].target));
  }
  absl::StrAppend(&svg, "</svg>\n");
  return svg;
}

std::string RenderLineSvg(const std::vector<std::pair<double, double>>& points,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  constexpr int kW = 480, kH = 320, kPad = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!points.empty()) {
    x0 = x1 = points[0].first;
    y0 = y1 = points[0].second;
    for (const auto& [x, y] : points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      if (std::isfinite(y)) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
  }
  const auto px = [&](double x) { return kPad + (x - x0) / (x1 - x0) * kW; };
  const auto py = [&](double y) {
    return kPad + (1.0 - (y - y0) / (y1 - y0)) * kH;
  };
  std::string path;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(y)) continue;
    absl::StrAppend(&path, path.empty() ? "M" : " L",
                    absl::StrFormat("%.2f %.2f", px(x), py(y)));
  }
  return absl::StrFormat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\">\n"
      "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
      "<text x=\"%d\" y=\"30\" font-family=\"sans-serif\" "
      "font-size=\"14\">%s</text>\n"
      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
      "stroke=\"black\"/>\n"
      "<path d=\"%s\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n"
      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">"
      "%s %g .. %g</text>\n"
      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">"
      "%s %g .. %g</text>\n"
      "</svg>\n",
      kW + 2 * kPad, kH + 2 * kPad, kPad, title, kPad, kPad, kW, kH, path,
      kPad, kH + kPad + 25, x_label, x0, x1, kPad, kH + kPad + 42, y_label, y0,
      y1);
}

absl::Status WriteEvalOutputs(const EvalReport& report,
                              const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) return absl::InternalError(absl::StrCat(out_dir, ": ", ec.message()));
  const std::string dir = out_dir + "/";
  RETURN_IF_ERROR(
      WriteFile(dir + "eval_results.csv", FormatEvalResultsCsv(report)));
  RETURN_IF_ERROR(WriteFile(dir + "summary.csv", FormatSummaryCsv(report)));
  for (const PpCurve& curve : report.curves) {
    RETURN_IF_ERROR(
        WriteFile(dir + "pp_" + curve.target + ".csv", FormatPpCsv(curve)));
  }
  return WriteFile(dir + "pp_" + report.family + ".svg",
                   RenderPpSvg(report.curves, "P-P " + report.family));
}

}  // namespace branchrl
