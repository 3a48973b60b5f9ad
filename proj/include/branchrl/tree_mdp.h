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

// Branch-and-bound as a tree MDP. A state is an open node, an action is a
// fractional variable, every step costs -1 and yields up to two child states:
// the children that survive fathoming at creation. The return of an episode is
// therefore -n_branched.

#ifndef BRANCHRL_TREE_MDP_H_
#define BRANCHRL_TREE_MDP_H_

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "branchrl/bnb.h"
#include "branchrl/observation.h"

namespace branchrl {

using ObservationPtr = std::shared_ptr<const Observation>;

inline constexpr double kStepReward = -1.0;

struct EpisodeStats {
  int64_t tree_size = 0;
  int64_t n_branched = 0;
  bool terminated_by_limit = false;
  double return_value = 0.0;
};

struct EnvStep {
  ObservationPtr next;  // null when the episode is over
  double reward = kStepReward;
  std::vector<ObservationPtr> children;  // surviving children, left first
  int terminal_children = 0;
  bool done() const { return next == nullptr; }
};

class BranchingEnv {
 public:
  // The environment keeps its own copy of the instance.
  BranchingEnv(MilpInstance instance, const Limits& limits,
               NodeSelection selection = NodeSelection::kDepthFirst);

  // Solves the root. Returns null if the root is already fathomed.
  absl::StatusOr<ObservationPtr> Reset();

  // `action` must be set in the current observation's mask.
  absl::StatusOr<EnvStep> Step(int action);

  bool done() const { return current_ == nullptr; }
  const ObservationPtr& current() const { return current_; }
  EpisodeStats stats() const;
  const BranchAndBound& tree() const { return *bnb_; }
  const MilpInstance& instance() const { return instance_; }

 private:
  ObservationPtr Observe(int node_id);
  void Advance();

  MilpInstance instance_;
  Limits limits_;
  NodeSelection selection_;
  std::shared_ptr<const GraphEdges> edges_;
  std::unique_ptr<BranchAndBound> bnb_;
  // Observations of queued nodes, extracted when they were created.
  std::map<int, ObservationPtr> pending_;
  ObservationPtr current_;
  double return_ = 0.0;
};

// Checks, for every branched node of a finished tree, that
//   V(s) = -1 + V(left) + V(right),  V(leaf) = 0,
// where V(s) = -(number of branched nodes in the subtree of s) is counted
// directly from parent links. Returns the offending node on failure.
absl::Status VerifyTreeValueRecursion(const std::vector<BnbNode>& nodes);

}  // namespace branchrl

#endif  // BRANCHRL_TREE_MDP_H_
