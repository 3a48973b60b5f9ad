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

#include "branchrl/branching.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "branchrl/simplex.h"
#include "branchrl/status_macros.h"

namespace branchrl {
namespace {

absl::Status CheckCandidates(const BranchingContext& context) {
  if (context.candidates.empty()) {
    return absl::FailedPreconditionError("no fractional candidates");
  }
  if (!context.node.lp || !context.node.lp->optimal()) {
    return absl::FailedPreconditionError("node LP not solved");
  }
  return absl::OkStatus();
}

}  // namespace

double StrongBranchingScore(double down_gain, double up_gain) {
  return std::max(down_gain, kMinGain) * std::max(up_gain, kMinGain);
}

absl::StatusOr<int> StrongBranchingRule::SelectVariable(
    const BranchingContext& context) {
  RETURN_IF_ERROR(CheckCandidates(context));
  if (context.candidates.size() == 1) return context.candidates[0];
  const LpResult& lp = *context.node.lp;
  int best = -1;
  double best_score = -1.0;
  for (int j : context.candidates) {
    const double v = lp.primal[j];
    ASSIGN_OR_RETURN(const ProbeBounds probe,
                     StrongBranchProbe(context.instance, context.node.over, j,
                                       std::floor(v), std::ceil(v)));
    const double down = std::isinf(probe.down) ? kInfeasibleGain
                                               : probe.down - lp.objective;
    const double up =
        std::isinf(probe.up) ? kInfeasibleGain : probe.up - lp.objective;
    const double score = StrongBranchingScore(down, up);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

absl::StatusOr<int> MostFractionalRule::SelectVariable(
    const BranchingContext& context) {
  RETURN_IF_ERROR(CheckCandidates(context));
  const LpResult& lp = *context.node.lp;
  int best = context.candidates[0];
  double best_frac = Fractionality(lp.primal[best]);
  for (int j : context.candidates.subspan(1)) {
    const double f = Fractionality(lp.primal[j]);
    if (f > best_frac) {
      best_frac = f;
      best = j;
    }
  }
  return best;
}

absl::StatusOr<int> RandomRule::SelectVariable(
    const BranchingContext& context) {
  if (context.candidates.empty()) {
    return absl::FailedPreconditionError("no fractional candidates");
  }
  std::uniform_int_distribution<size_t> pick(0, context.candidates.size() - 1);
  return context.candidates[pick(context.rng)];
}

absl::StatusOr<int> ReplayRule::SelectVariable(
    const BranchingContext& context) {
  if (next_ >= actions_.size()) {
    return absl::OutOfRangeError("replay sequence exhausted");
  }
  const int var = actions_[next_++];
  if (!std::binary_search(context.candidates.begin(), context.candidates.end(),
                          var)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "replayed variable ", var, " is not a candidate at node ",
        context.node.id));
  }
  return var;
}

std::vector<int> BranchActions(const std::vector<TraceEvent>& trace) {
  std::vector<int> actions;
  for (const TraceEvent& e : trace) {
    if (e.kind == TraceEvent::Kind::kBranch) actions.push_back(e.action);
  }
  return actions;
}

absl::StatusOr<std::unique_ptr<BranchingRule>> MakeClassicRule(
    absl::string_view name) {
  if (name == "strong") return std::make_unique<StrongBranchingRule>();
  if (name == "mostfrac") return std::make_unique<MostFractionalRule>();
  if (name == "random") return std::make_unique<RandomRule>();
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown branching rule '", name, "' (strong|mostfrac|random|agent)"));
}

}  // namespace branchrl
