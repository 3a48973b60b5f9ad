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

// Bipartite variable/constraint graph seen by the branching agent.
//
// Variable features (kVarFeatures = 10), per column j at the node:
//   0 c_j / |c|_inf            5 basic flag
//   1 LP value                 6 reduced cost / |c|_inf
//   2 min(f, 1 - f)            7 squash(local lower), -1 if -inf
//   3 at-lower flag            8 squash(local upper), +1 if +inf
//   4 at-upper flag            9 both local bounds finite
// with squash(t) = t / (1 + |t|).
//
// Constraint features (kConsFeatures = 5), per row i with |a_i|_inf = r_i:
//   0 b_i / r_i   1 y_i r_i / |c|_inf   2 slack / r_i   3 tight flag
//   4 nnz(a_i) / n
//
// Edges carry a_ij / r_i. Every row is present, tight or not.

#ifndef BRANCHRL_OBSERVATION_H_
#define BRANCHRL_OBSERVATION_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "branchrl/bnb.h"
#include "branchrl/milp.h"

namespace branchrl {

inline constexpr int kVarFeatures = 10;
inline constexpr int kConsFeatures = 5;

// Static part of the graph, shared by every observation of one instance.
struct GraphEdges {
  int n_vars = 0;
  int n_cons = 0;
  std::vector<int> cons;  // edge k joins row cons[k] ...
  std::vector<int> var;   // ... and column var[k]
  std::vector<double> weight;
  std::vector<int> cons_degree;
  std::vector<int> var_degree;

  int size() const { return static_cast<int>(cons.size()); }
  bool operator==(const GraphEdges&) const = default;
};

std::shared_ptr<const GraphEdges> BuildGraphEdges(const MilpInstance& instance);

struct Observation {
  int node_id = -1;
  std::vector<double> var_features;   // n_vars x kVarFeatures, row-major
  std::vector<double> cons_features;  // n_cons x kConsFeatures, row-major
  std::shared_ptr<const GraphEdges> edges;
  std::vector<uint8_t> action_mask;  // 1 = fractional integer variable

  int n_vars() const { return edges->n_vars; }
  int n_cons() const { return edges->n_cons; }
  // Masked variable indices in increasing order.
  std::vector<int> Actions() const;
  bool operator==(const Observation& other) const;
};

// `node` must carry an optimal LP.
Observation ExtractObservation(const MilpInstance& instance,
                               std::shared_ptr<const GraphEdges> edges,
                               const BnbNode& node);

}  // namespace branchrl

#endif  // BRANCHRL_OBSERVATION_H_
