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

// Independent reference computations used only by tests. None of these share
// code paths with the solver they check (except the facility oracle, which
// enumerates open patterns and trusts the LP for the continuous part).

#ifndef BRANCHRL_TESTS_ORACLES_H_
#define BRANCHRL_TESTS_ORACLES_H_

#include <cstdint>
#include <random>
#include <vector>

#include "branchrl/milp.h"
#include "branchrl/observation.h"
#include "branchrl/simplex.h"

namespace branchrl::testing {

// Exhaustive optimum of an all-binary instance; +inf when infeasible.
double BinaryEnumerationOptimum(const MilpInstance& instance);

// Multiple knapsack optimum by enumerating (knapsacks + 1)^items placements.
double KnapsackPlacementOptimum(const MilpInstance& instance, int items,
                                int knapsacks);

// Facility location optimum: enumerate open patterns, LP for assignments.
double FacilityPatternOptimum(const MilpInstance& instance, int facilities);

// LP optimum by enumerating every vertex (intersection of n active constraints
// among rows and finite bounds). Only for tiny, boxed problems.
double VertexEnumerationLp(const MilpInstance& instance,
                           const BoundOverride& over = {});

// Random LP with every variable boxed in a small integer range.
MilpInstance RandomBoxedLp(std::mt19937_64& rng, int num_vars, int num_rows);

// Max |row activity - rhs| over violated rows and bound violations.
double MaxViolation(const MilpInstance& instance, const BoundOverride& over,
                    const std::vector<double>& x);

// Random bipartite observation with Gaussian features; each (row, column)
// pair is an edge with probability `density`. At least one mask bit is set.
Observation RandomObservation(std::mt19937_64& rng, int n_vars, int n_cons,
                              double density);

// Copy of `obs` with variables reordered: new variable k is old perm[k].
Observation PermuteVariables(const Observation& obs,
                             const std::vector<int>& perm);

// Copy of `obs` with constraints reordered: new row k is old perm[k].
Observation PermuteConstraints(const Observation& obs,
                               const std::vector<int>& perm);

}  // namespace branchrl::testing

#endif  // BRANCHRL_TESTS_ORACLES_H_
