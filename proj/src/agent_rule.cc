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

#include "branchrl/agent_rule.h"

namespace branchrl {

absl::StatusOr<int> AgentRule::SelectVariable(const BranchingContext& context) {
  if (context.candidates.empty()) {
    return absl::FailedPreconditionError("no fractional candidates");
  }
  const Observation obs =
      ExtractObservation(context.instance,
                         BuildGraphEdges(context.instance), context.node);
  const QOutput out = net_->Forward(obs);
  if (out.best < 0) return absl::InternalError("empty action mask");
  return out.best;
}

}  // namespace branchrl
