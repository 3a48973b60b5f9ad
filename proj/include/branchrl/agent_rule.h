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

#ifndef BRANCHRL_AGENT_RULE_H_
#define BRANCHRL_AGENT_RULE_H_

#include <memory>
#include <string>

#include "branchrl/branching.h"
#include "branchrl/observation.h"
#include "branchrl/qnetwork.h"

namespace branchrl {

// Greedy policy of a trained network: masked argmin of the logits.
class AgentRule : public BranchingRule {
 public:
  explicit AgentRule(std::shared_ptr<const QNetwork> net)
      : net_(std::move(net)) {}

  absl::StatusOr<int> SelectVariable(const BranchingContext& context) override;
  std::string name() const override { return "agent"; }

 private:
  std::shared_ptr<const QNetwork> net_;
};

}  // namespace branchrl

#endif  // BRANCHRL_AGENT_RULE_H_
