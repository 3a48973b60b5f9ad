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

#include "branchrl/bnb.h"

#include <cmath>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "branchrl/branching.h"
#include "branchrl/status_macros.h"

namespace branchrl {

const char* NodeStatusName(NodeStatus status) {
  switch (status) {
    case NodeStatus::kOpen:
      return "open";
    case NodeStatus::kBranched:
      return "branched";
    case NodeStatus::kFathomedInfeasible:
      return "infeasible";
    case NodeStatus::kFathomedBound:
      return "bound";
    case NodeStatus::kFathomedIntegral:
      return "integral";
    case NodeStatus::kPruned:
      return "pruned";
  }
  return "?";
}

const char* NodeSelectionName(NodeSelection selection) {
  return selection == NodeSelection::kDepthFirst ? "dfs" : "bestbound";
}

absl::StatusOr<NodeSelection> ParseNodeSelection(absl::string_view name) {
  if (name == "dfs") return NodeSelection::kDepthFirst;
  if (name == "bestbound" || name == "best-bound") {
    return NodeSelection::kBestBound;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown node selection '", name, "' (dfs|bestbound)"));
}

std::string FormatTrace(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const TraceEvent& e : trace) {
    const char* kind = e.kind == TraceEvent::Kind::kCreate   ? "create"
                       : e.kind == TraceEvent::Kind::kBranch ? "branch"
                                                             : "prune";
    absl::StrAppendFormat(&out, "%s %d %d %d %.17g %s\n", kind, e.node,
                          e.parent, e.action, e.lp_bound,
                          NodeStatusName(e.status));
  }
  return out;
}

BranchAndBound::BranchAndBound(const MilpInstance& instance,
                               NodeSelection selection, const Limits& limits)
    : instance_(instance), selection_(selection), limits_(limits) {}

absl::Status BranchAndBound::Start() {
  if (!nodes_.empty()) return absl::FailedPreconditionError("already started");
  start_time_ = std::chrono::steady_clock::now();
  const int root = CreateNode(-1, BoundOverride(), 0);
  ASSIGN_OR_RETURN(LpResult lp, SolveLp(instance_, nodes_[root].over));
  nodes_[root].lp = std::move(lp);
  Classify(nodes_[root]);
  if (open_.empty()) done_ = true;
  return absl::OkStatus();
}

int BranchAndBound::CreateNode(int parent, BoundOverride over, int depth) {
  BnbNode& node = nodes_.emplace_back();
  node.id = static_cast<int>(nodes_.size()) - 1;
  node.parent = parent;
  node.over = std::move(over);
  node.depth = depth;
  return node.id;
}

// Fathom order: infeasible, then bound-dominated, then integral.
void BranchAndBound::Classify(BnbNode& node) {
  if (!node.lp->optimal()) {
    node.status = NodeStatus::kFathomedInfeasible;
  } else if (node.lp->objective >= upper_ - kBoundTol) {
    node.status = NodeStatus::kFathomedBound;
  } else if (FractionalVariables(instance_, *node.lp).empty()) {
    node.status = NodeStatus::kFathomedIntegral;
    if (node.lp->objective < upper_ - kBoundTol) {
      upper_ = node.lp->objective;
      incumbent_ = node.lp->primal;
    }
  } else {
    node.status = NodeStatus::kOpen;
    open_.push_back(node.id);
  }
  Record(TraceEvent::Kind::kCreate, node);
}

void BranchAndBound::Record(TraceEvent::Kind kind, const BnbNode& node,
                            int action) {
  TraceEvent e;
  e.kind = kind;
  e.node = node.id;
  e.parent = node.parent;
  e.action = action;
  e.lp_bound = node.bound();
  e.status = node.status;
  trace_.push_back(e);
}

bool BranchAndBound::LimitReached() const {
  if (static_cast<int64_t>(nodes_.size()) + 2 > limits_.node_limit) {
    return true;
  }
  if (limits_.time_limit_seconds) {
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start_time_;
    if (elapsed.count() > *limits_.time_limit_seconds) return true;
  }
  return false;
}

std::optional<int> BranchAndBound::SelectNext() {
  while (!done_ && !open_.empty()) {
    const int pos = selection_ == NodeSelection::kDepthFirst
                        ? DfsSelect(open_)
                        : BestBoundSelect(nodes_, open_);
    const int id = open_[pos];
    BnbNode& node = nodes_[id];
    if (node.bound() >= upper_ - kBoundTol) {
      open_.erase(open_.begin() + pos);
      node.status = NodeStatus::kPruned;
      Record(TraceEvent::Kind::kPrune, node);
      continue;
    }
    // The node stays queued when a limit stops the search.
    if (LimitReached()) {
      done_ = true;
      status_ = SolveStatus::kNodeLimit;
      return std::nullopt;
    }
    open_.erase(open_.begin() + pos);
    return id;
  }
  done_ = true;
  return std::nullopt;
}

std::vector<int> BranchAndBound::Candidates(int node_id) const {
  const BnbNode& node = nodes_[node_id];
  if (!node.lp || !node.lp->optimal()) return {};
  return FractionalVariables(instance_, *node.lp);
}

absl::Status BranchAndBound::Expand(int node_id, int var) {
  if (node_id < 0 || node_id >= static_cast<int>(nodes_.size()) ||
      nodes_[node_id].status != NodeStatus::kOpen) {
    return absl::FailedPreconditionError(
        absl::StrCat("node ", node_id, " is not open"));
  }
  if (var < 0 || var >= instance_.num_vars() || !instance_.is_integer[var]) {
    return absl::FailedPreconditionError(
        absl::StrCat("variable ", var, " is not an integer variable"));
  }
  const double value = nodes_[node_id].lp->primal[var];
  if (Fractionality(value) <= kIntegralityTol) {
    return absl::FailedPreconditionError(absl::StrCat(
        "variable ", var, " is not fractional at node ", node_id));
  }
  const double down = std::floor(value);
  const double up = std::ceil(value);

  // nodes_ may reallocate below; copy what we need first.
  const BoundOverride parent_over = nodes_[node_id].over;
  const int depth = nodes_[node_id].depth + 1;
  const double lower = parent_over.Lower(instance_, var);
  const double upper = parent_over.Upper(instance_, var);

  BoundOverride left_over = parent_over;
  left_over.Set(var, lower, down);
  BoundOverride right_over = parent_over;
  right_over.Set(var, up, upper);
  ASSIGN_OR_RETURN(LpResult left_lp, SolveLp(instance_, left_over));
  ASSIGN_OR_RETURN(LpResult right_lp, SolveLp(instance_, right_over));

  const int left = CreateNode(node_id, std::move(left_over), depth);
  const int right = CreateNode(node_id, std::move(right_over), depth);
  BnbNode& parent = nodes_[node_id];
  parent.status = NodeStatus::kBranched;
  parent.branch_var = var;
  parent.children = {left, right};
  ++n_branched_;
  Record(TraceEvent::Kind::kBranch, parent, var);

  // Left is queued first so that depth-first search visits the right child
  // first.
  nodes_[left].lp = std::move(left_lp);
  Classify(nodes_[left]);
  nodes_[right].lp = std::move(right_lp);
  Classify(nodes_[right]);
  return absl::OkStatus();
}

SolveResult BranchAndBound::Result() const {
  SolveResult result;
  result.status = status_;
  result.best_objective = upper_;
  result.best_solution = incumbent_;
  result.tree_size = static_cast<int64_t>(nodes_.size());
  result.n_branched = n_branched_;
  for (const BnbNode& node : nodes_) {
    ++result.fathom_counts[static_cast<int>(node.status)];
  }
  result.trace = trace_;
  return result;
}

int DfsSelect(const std::vector<int>& open) {
  return static_cast<int>(open.size()) - 1;
}

int BestBoundSelect(const std::vector<BnbNode>& nodes,
                    const std::vector<int>& open) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(open.size()); ++i) {
    const BnbNode& a = nodes[open[i]];
    const BnbNode& b = nodes[open[best]];
    if (a.bound() < b.bound() || (a.bound() == b.bound() && a.id < b.id)) {
      best = i;
    }
  }
  return best;
}

absl::StatusOr<SolveResult> Solve(const MilpInstance& instance,
                                  BranchingRule& rule, NodeSelection selection,
                                  const Limits& limits, uint64_t seed) {
  std::mt19937_64 rng(seed);
  BranchAndBound bnb(instance, selection, limits);
  RETURN_IF_ERROR(bnb.Start());
  while (std::optional<int> id = bnb.SelectNext()) {
    const std::vector<int> candidates = bnb.Candidates(*id);
    BranchingContext context{instance, bnb.node(*id), candidates, rng};
    ASSIGN_OR_RETURN(const int var, rule.SelectVariable(context));
    RETURN_IF_ERROR(bnb.Expand(*id, var));
  }
  return bnb.Result();
}

std::vector<int64_t> SubtreeBranchedCounts(const std::vector<BnbNode>& nodes) {
  std::vector<int64_t> count(nodes.size(), 0);
  // Children always have larger ids than their parent.
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const BnbNode& node = nodes[i];
    if (node.status != NodeStatus::kBranched) continue;
    count[i] = 1 + count[node.children[0]] + count[node.children[1]];
  }
  return count;
}

}  // namespace branchrl
