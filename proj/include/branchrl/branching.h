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

// Variable selection rules. A rule sees the node with its solved LP and the
// fractional candidate set, and must return a member of that set.

#ifndef BRANCHRL_BRANCHING_H_
#define BRANCHRL_BRANCHING_H_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "branchrl/bnb.h"
#include "branchrl/milp.h"

namespace branchrl {

struct BranchingContext {
  const MilpInstance& instance;
  const BnbNode& node;
  std::span<const int> candidates;  // non-empty, increasing
  std::mt19937_64& rng;
};

class BranchingRule {
 public:
  virtual ~BranchingRule() = default;
  virtual absl::StatusOr<int> SelectVariable(const BranchingContext& context) = 0;
  virtual std::string name() const = 0;
  // True if the choice depends on the rng.
  virtual bool stochastic() const { return false; }
};

// Gain used for a child whose LP is infeasible.
inline constexpr double kInfeasibleGain = 1e9;
inline constexpr double kMinGain = 1e-6;

// max(down_gain, 1e-6) * max(up_gain, 1e-6).
double StrongBranchingScore(double down_gain, double up_gain);

class StrongBranchingRule : public BranchingRule {
 public:
  absl::StatusOr<int> SelectVariable(const BranchingContext& context) override;
  std::string name() const override { return "strong"; }
};

class MostFractionalRule : public BranchingRule {
 public:
  absl::StatusOr<int> SelectVariable(const BranchingContext& context) override;
  std::string name() const override { return "mostfrac"; }
};

class RandomRule : public BranchingRule {
 public:
  absl::StatusOr<int> SelectVariable(const BranchingContext& context) override;
  std::string name() const override { return "random"; }
  bool stochastic() const override { return true; }
};

// Replays a recorded sequence of branching variables, one per call.
class ReplayRule : public BranchingRule {
 public:
  explicit ReplayRule(std::vector<int> actions) : actions_(std::move(actions)) {}
  absl::StatusOr<int> SelectVariable(const BranchingContext& context) override;
  std::string name() const override { return "replay"; }

 private:
  std::vector<int> actions_;
  size_t next_ = 0;
};

// Branching variables of every kBranch event, in order.
std::vector<int> BranchActions(const std::vector<TraceEvent>& trace);

// "strong", "mostfrac" or "random". The agent rule needs a checkpoint and is
// built elsewhere.
absl::StatusOr<std::unique_ptr<BranchingRule>> MakeClassicRule(
    absl::string_view name);

}  // namespace branchrl

#endif  // BRANCHRL_BRANCHING_H_
