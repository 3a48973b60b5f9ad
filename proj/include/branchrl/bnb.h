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

// Pure branch-and-bound over the LP relaxation. No cuts, no presolve, no
// primal heuristics: the only thing that changes the tree is the branching
// rule and the node selector.
//
// Children are solved as soon as they are created and fathomed on the spot,
// so a caller that branches on a node can immediately see which children
// survive. tree_size counts every node ever created, including children that
// were fathomed at creation; at optimality tree_size == 2 * n_branched + 1.

#ifndef BRANCHRL_BNB_H_
#define BRANCHRL_BNB_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "branchrl/milp.h"
#include "branchrl/simplex.h"

namespace branchrl {

class BranchingRule;

inline constexpr double kBoundTol = 1e-6;

enum class NodeStatus {
  kOpen,
  kBranched,
  kFathomedInfeasible,
  kFathomedBound,
  kFathomedIntegral,
  kPruned,  // bound-dominated when popped from the open list
};
inline constexpr int kNumNodeStatuses = 6;

const char* NodeStatusName(NodeStatus status);

struct BnbNode {
  int id = 0;
  int parent = -1;
  BoundOverride over;  // cumulative from the root
  int depth = 0;
  std::optional<LpResult> lp;
  NodeStatus status = NodeStatus::kOpen;
  int branch_var = -1;
  std::array<int, 2> children = {-1, -1};  // {left (x <= floor), right}

  double bound() const { return lp && lp->optimal() ? lp->objective : kInf; }
};

enum class NodeSelection { kDepthFirst, kBestBound };

const char* NodeSelectionName(NodeSelection selection);
absl::StatusOr<NodeSelection> ParseNodeSelection(absl::string_view name);

struct Limits {
  int64_t node_limit = 1'000'000;
  std::optional<double> time_limit_seconds;
};

enum class SolveStatus { kOptimal, kNodeLimit };

struct TraceEvent {
  enum class Kind { kCreate, kBranch, kPrune };
  Kind kind = Kind::kCreate;
  int node = 0;
  int parent = -1;
  int action = -1;  // branching variable for kBranch
  double lp_bound = kInf;
  NodeStatus status = NodeStatus::kOpen;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kOptimal;
  double best_objective = kInf;
  std::optional<std::vector<double>> best_solution;
  int64_t tree_size = 0;
  int64_t n_branched = 0;
  std::array<int64_t, kNumNodeStatuses> fathom_counts = {};
  std::vector<TraceEvent> trace;

  int64_t count(NodeStatus s) const {
    return fathom_counts[static_cast<int>(s)];
  }
};

// One line per event: "event node_id parent_id action lp_bound status".
std::string FormatTrace(const std::vector<TraceEvent>& trace);

class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& instance, NodeSelection selection,
                 const Limits& limits);

  // Solves the root LP. Must be called once before anything else.
  absl::Status Start();

  // Pops the next node to branch on, pruning dominated nodes on the way.
  // Returns nullopt once the search is over; Result() says why.
  std::optional<int> SelectNext();

  // Branches `node_id` on `var`, which must be fractional at its LP value.
  // Both children are solved and fathom-checked before they are queued.
  absl::Status Expand(int node_id, int var);

  bool done() const { return done_; }
  const BnbNode& node(int id) const { return nodes_[id]; }
  const std::vector<BnbNode>& nodes() const { return nodes_; }
  const std::vector<int>& open() const { return open_; }
  double upper_bound() const { return upper_; }
  const MilpInstance& instance() const { return instance_; }

  // Fractional integer variables at the node's LP solution.
  std::vector<int> Candidates(int node_id) const;

  SolveResult Result() const;

 private:
  int CreateNode(int parent, BoundOverride over, int depth);
  void Classify(BnbNode& node);
  void Record(TraceEvent::Kind kind, const BnbNode& node, int action = -1);
  bool LimitReached() const;

  const MilpInstance& instance_;
  const NodeSelection selection_;
  const Limits limits_;
  std::chrono::steady_clock::time_point start_time_;

  std::vector<BnbNode> nodes_;
  std::vector<int> open_;  // push order == creation order
  double upper_ = kInf;
  std::optional<std::vector<double>> incumbent_;
  int64_t n_branched_ = 0;
  bool done_ = false;
  SolveStatus status_ = SolveStatus::kOptimal;
  std::vector<TraceEvent> trace_;
};

// Index into `open` (node ids) chosen by each selector.
int DfsSelect(const std::vector<int>& open);
int BestBoundSelect(const std::vector<BnbNode>& nodes,
                    const std::vector<int>& open);

// Full solve with `rule` choosing the branching variable. The rng handed to
// the rule is seeded from `seed`.
absl::StatusOr<SolveResult> Solve(const MilpInstance& instance,
                                  BranchingRule& rule, NodeSelection selection,
                                  const Limits& limits, uint64_t seed);

// Number of branched nodes in every node's subtree, by node id.
std::vector<int64_t> SubtreeBranchedCounts(const std::vector<BnbNode>& nodes);

}  // namespace branchrl

#endif  // BRANCHRL_BNB_H_
