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

// Random instance families. Every generator is a pure function of its size
// parameters and seed, and emits the canonical minimization form.

#ifndef BRANCHRL_GENERATORS_H_
#define BRANCHRL_GENERATORS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "branchrl/milp.h"

namespace branchrl {

enum class Family { kSetCover, kCombAuction, kMaxIndSet, kFacilityLoc, kMultKnapsack };

absl::string_view FamilyName(Family family);
absl::StatusOr<Family> ParseFamily(absl::string_view name);

// Size parameters for every family; only the fields of `family` are read.
// The defaults are the desk-scale sizes used for training and evaluation.
struct GeneratorConfig {
  Family family = Family::kSetCover;
  int set_cover_rows = 80;
  int set_cover_cols = 100;
  double set_cover_density = 0.2;
  int auction_items = 20;
  int auction_bids = 60;
  int indset_nodes = 40;
  double indset_edge_prob = 0.25;
  int facility_customers = 8;
  int facility_facilities = 6;
  int knapsack_items = 20;
  int knapsack_count = 2;
};

absl::StatusOr<MilpInstance> Generate(const GeneratorConfig& config,
                                      uint64_t seed);

// Covering rows "sum_j a_ij x_j >= 1" are stored negated.
absl::StatusOr<MilpInstance> GenerateSetCover(int rows, int cols,
                                              double density, uint64_t seed);

// Set packing over bids; one "<= 1" row per item, objective = -price.
absl::StatusOr<MilpInstance> GenerateCombAuction(int items, int bids,
                                                 uint64_t seed);

// Edge formulation on an Erdos-Renyi graph.
absl::StatusOr<MilpInstance> GenerateMaxIndSet(int nodes, double edge_prob,
                                               uint64_t seed);

// Independent set instance on an explicit edge list.
MilpInstance BuildIndependentSet(int nodes,
                                 const std::vector<std::pair<int, int>>& edges);

// Capacitated facility location. Variables: open decisions y_f (binary)
// first, then assignment fractions x_cf at index F + c * F + f.
absl::StatusOr<MilpInstance> GenerateFacilityLocation(int customers,
                                                      int facilities,
                                                      uint64_t seed);

// Multiple knapsack. Variable x_ik (item i in knapsack k) at index i * K + k.
// Rows: one uniqueness row per item, then one capacity row per knapsack.
absl::StatusOr<MilpInstance> GenerateMultKnapsack(int items, int knapsacks,
                                                  uint64_t seed);

}  // namespace branchrl

#endif  // BRANCHRL_GENERATORS_H_
