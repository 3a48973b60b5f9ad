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

#include "branchrl/tree_mdp.h"

#include <utility>

#include "absl/strings/str_cat.h"
#include "branchrl/status_macros.h"

namespace branchrl {

BranchingEnv::BranchingEnv(MilpInstance instance, const Limits& limits,
                           NodeSelection selection)
    : instance_(std::move(instance)),
      limits_(limits),
      selection_(selection),
      edges_(BuildGraphEdges(instance_)) {}

ObservationPtr BranchingEnv::Observe(int node_id) {
  return std::make_shared<const Observation>(
      ExtractObservation(instance_, edges_, bnb_->node(node_id)));
}

absl::StatusOr<ObservationPtr> BranchingEnv::Reset() {
  bnb_ = std::make_unique<BranchAndBound>(instance_, selection_, limits_);
  pending_.clear();
  current_ = nullptr;
  return_ = 0.0;
  RETURN_IF_ERROR(bnb_->Start());
  if (bnb_->node(0).status == NodeStatus::kOpen) pending_[0] = Observe(0);
  Advance();
  return current_;
}

// Moves to the next node chosen by the selector, dropping observations of
// nodes that were pruned on the way.
void BranchingEnv::Advance() {
  const std::optional<int> next = bnb_->SelectNext();
  current_ = nullptr;
  if (next) {
    auto it = pending_.find(*next);
    current_ = it->second;
    pending_.erase(it);
  }
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (bnb_->node(it->first).status != NodeStatus::kOpen) {
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
}

absl::StatusOr<EnvStep> BranchingEnv::Step(int action) {
  if (current_ == nullptr) {
    return absl::FailedPreconditionError("episode is over");
  }
  if (action < 0 || action >= current_->n_vars() ||
      !current_->action_mask[action]) {
    return absl::FailedPreconditionError(
        absl::StrCat("action ", action, " is masked out at node ",
                     current_->node_id));
  }
  const int node_id = current_->node_id;
  RETURN_IF_ERROR(bnb_->Expand(node_id, action));
  return_ += kStepReward;

  EnvStep step;
  for (int child : bnb_->node(node_id).children) {
    if (bnb_->node(child).status == NodeStatus::kOpen) {
      ObservationPtr obs = Observe(child);
      pending_[child] = obs;
      step.children.push_back(std::move(obs));
    } else {
      ++step.terminal_children;
    }
  }
  Advance();
  step.next = current_;
  return step;
}

EpisodeStats BranchingEnv::stats() const {
  EpisodeStats stats;
  if (!bnb_) return stats;
  const SolveResult result = bnb_->Result();
  stats.tree_size = result.tree_size;
  stats.n_branched = result.n_branched;
  stats.terminated_by_limit = result.status == SolveStatus::kNodeLimit;
  stats.return_value = return_;
  return stats;
}

absl::Status VerifyTreeValueRecursion(const std::vector<BnbNode>& nodes) {
  std::vector<int64_t> branched_below(nodes.size(), 0);
  for (const BnbNode& node : nodes) {
    if (node.status != NodeStatus::kBranched) continue;
    for (int a = node.id; a >= 0; a = nodes[a].parent) ++branched_below[a];
  }
  auto value = [&](int id) -> int64_t {
    return nodes[id].status == NodeStatus::kBranched ? -branched_below[id] : 0;
  };
  for (const BnbNode& node : nodes) {
    if (node.status != NodeStatus::kBranched) continue;
    const int64_t lhs = value(node.id);
    const int64_t rhs = -1 + value(node.children[0]) + value(node.children[1]);
    if (lhs != rhs) {
      return absl::InternalError(absl::StrCat("value recursion fails at node ",
                                              node.id, ": ", lhs, " != ", rhs));
    }
  }
  return absl::OkStatus();
}

}  // namespace branchrl
