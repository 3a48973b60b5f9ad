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

#include "branchrl/generators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace branchrl {
namespace {

using Rng = std::mt19937_64;

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double UniformReal(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// All-binary instance with the given objective.
MilpInstance BinaryInstance(std::string name, std::vector<double> objective,
                            uint64_t seed) {
  MilpInstance instance;
  const int n = static_cast<int>(objective.size());
  instance.name = std::move(name);
  instance.objective = std::move(objective);
  instance.lower.assign(n, 0.0);
  instance.upper.assign(n, 1.0);
  instance.is_integer.assign(n, true);
  instance.seed = seed;
  return instance;
}

SparseRow UnitRow(std::vector<int> index, double coef, double rhs) {
  SparseRow row;
  std::sort(index.begin(), index.end());
  row.coef.assign(index.size(), coef);
  row.index = std::move(index);
  row.rhs = rhs;
  return row;
}

// k distinct values from [0, n), in random order.
std::vector<int> SampleWithoutReplacement(Rng& rng, int n, int k) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::swap(pool[i], pool[UniformInt(rng, i, n - 1)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

absl::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kSetCover:
      return "setcover";
    case Family::kCombAuction:
      return "cauction";
    case Family::kMaxIndSet:
      return "indset";
    case Family::kFacilityLoc:
      return "facility";
    case Family::kMultKnapsack:
      return "knapsack";
  }
  return "unknown";
}

absl::StatusOr<Family> ParseFamily(absl::string_view name) {
  for (Family f : {Family::kSetCover, Family::kCombAuction, Family::kMaxIndSet,
                   Family::kFacilityLoc, Family::kMultKnapsack}) {
    if (name == FamilyName(f)) return f;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown family '", name,
                   "' (expected setcover, cauction, indset, facility or "
                   "knapsack)"));
}

absl::StatusOr<MilpInstance> Generate(const GeneratorConfig& config,
                                      uint64_t seed) {
  switch (config.family) {
    case Family::kSetCover:
      return GenerateSetCover(config.set_cover_rows, config.set_cover_cols,
                              config.set_cover_density, seed);
    case Family::kCombAuction:
      return GenerateCombAuction(config.auction_items, config.auction_bids,
                                 seed);
    case Family::kMaxIndSet:
      return GenerateMaxIndSet(config.indset_nodes, config.indset_edge_prob,
                               seed);
    case Family::kFacilityLoc:
      return GenerateFacilityLocation(config.facility_customers,
                                      config.facility_facilities, seed);
    case Family::kMultKnapsack:
      return GenerateMultKnapsack(config.knapsack_items, config.knapsack_count,
                                  seed);
  }
  return absl::InvalidArgumentError("unknown family");
}

absl::StatusOr<MilpInstance> GenerateSetCover(int rows, int cols,
                                              double density, uint64_t seed) {
  if (rows < 2 || cols < rows || !(density > 0.0 && density <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "set cover needs rows >= 2, cols >= rows, density in (0, 1]; got ",
        rows, "x", cols, " density ", density));
  }
  Rng rng(seed);
  std::bernoulli_distribution coin(density);
  std::vector<std::vector<char>> member(rows, std::vector<char>(cols, 0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) member[i][j] = coin(rng) ? 1 : 0;
  }
  // Repair: every row covers at least two columns...
  for (int i = 0; i < rows; ++i) {
    int count = static_cast<int>(
        std::count(member[i].begin(), member[i].end(), 1));
    while (count < 2) {
      const int j = UniformInt(rng, 0, cols - 1);
      if (!member[i][j]) {
        member[i][j] = 1;
        ++count;
      }
    }
  }
  // ...and every column sits in at least one row.
  for (int j = 0; j < cols; ++j) {
    bool covered = false;
    for (int i = 0; i < rows && !covered; ++i) covered = member[i][j];
    if (!covered) member[UniformInt(rng, 0, rows - 1)][j] = 1;
  }

  std::vector<double> cost(cols);
  for (double& c : cost) c = UniformInt(rng, 1, 100);

  MilpInstance instance = BinaryInstance(
      absl::StrCat("setcover_", rows, "x", cols, "_s", seed), std::move(cost),
      seed);
  for (int i = 0; i < rows; ++i) {
    std::vector<int> index;
    for (int j = 0; j < cols; ++j) {
      if (member[i][j]) index.push_back(j);
    }
    instance.rows.push_back(UnitRow(std::move(index), -1.0, -1.0));
  }
  return instance;
}

absl::StatusOr<MilpInstance> GenerateCombAuction(int items, int bids,
                                                 uint64_t seed) {
  if (items < 2 || bids < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "combinatorial auction needs items >= 2 and bids >= 2; got ", items,
        " / ", bids));
  }
  Rng rng(seed);
  std::vector<int> item_value(items);
  for (int& v : item_value) v = UniformInt(rng, 1, 20);

  const int max_bundle = std::min(items, 5);
  std::vector<std::vector<int>> bundles(bids);
  std::vector<double> price(bids);
  for (int b = 0; b < bids; ++b) {
    const int size = UniformInt(rng, 1, max_bundle);
    bundles[b] = SampleWithoutReplacement(rng, items, size);
    double base = 0.0;
    for (int i : bundles[b]) base += item_value[i];
    // Bundles are worth somewhat more than their parts.
    price[b] = std::max(1.0, std::round(base * UniformReal(rng, 1.0, 1.5)));
  }

  std::vector<double> objective(bids);
  for (int b = 0; b < bids; ++b) objective[b] = -price[b];
  MilpInstance instance = BinaryInstance(
      absl::StrCat("cauction_", items, "x", bids, "_s", seed),
      std::move(objective), seed);
  std::vector<std::vector<int>> bids_of_item(items);
  for (int b = 0; b < bids; ++b) {
    for (int i : bundles[b]) bids_of_item[i].push_back(b);
  }
  for (int i = 0; i < items; ++i) {
    instance.rows.push_back(UnitRow(std::move(bids_of_item[i]), 1.0, 1.0));
  }
  return instance;
}

MilpInstance BuildIndependentSet(
    int nodes, const std::vector<std::pair<int, int>>& edges) {
  MilpInstance instance =
      BinaryInstance(absl::StrCat("indset_", nodes, "_e", edges.size()),
                     std::vector<double>(nodes, -1.0), 0);
  for (const auto& [u, v] : edges) {
    instance.rows.push_back(UnitRow({u, v}, 1.0, 1.0));
  }
  return instance;
}

absl::StatusOr<MilpInstance> GenerateMaxIndSet(int nodes, double edge_prob,
                                               uint64_t seed) {
  if (nodes < 2 || !(edge_prob > 0.0 && edge_prob < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "independent set needs nodes >= 2 and edge_prob in (0, 1); got ",
        nodes, " / ", edge_prob));
  }
  Rng rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < nodes; ++u) {
    for (int v = u + 1; v < nodes; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  MilpInstance instance = BuildIndependentSet(nodes, edges);
  instance.name = absl::StrCat("indset_", nodes, "_s", seed);
  instance.seed = seed;
  return instance;
}

absl::StatusOr<MilpInstance> GenerateFacilityLocation(int customers,
                                                      int facilities,
                                                      uint64_t seed) {
  if (customers < 2 || facilities < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "facility location needs customers >= 2 and facilities >= 2; got ",
        customers, " / ", facilities));
  }
  Rng rng(seed);
  const int num_f = facilities;
  const int num_c = customers;

  std::vector<double> cx(num_c), cy(num_c), fx(num_f), fy(num_f);
  for (int c = 0; c < num_c; ++c) {
    cx[c] = UniformReal(rng, 0.0, 1.0);
    cy[c] = UniformReal(rng, 0.0, 1.0);
  }
  for (int f = 0; f < num_f; ++f) {
    fx[f] = UniformReal(rng, 0.0, 1.0);
    fy[f] = UniformReal(rng, 0.0, 1.0);
  }
  std::vector<double> demand(num_c);
  for (double& d : demand) d = UniformInt(rng, 5, 35);
  std::vector<double> capacity(num_f);
  for (double& s : capacity) s = UniformInt(rng, 10, 160);

  // Total capacity must cover twice the total demand.
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double total_capacity =
      std::accumulate(capacity.begin(), capacity.end(), 0.0);
  if (total_capacity < 2.0 * total_demand) {
    const double scale = 2.0 * total_demand / total_capacity;
    for (double& s : capacity) s = std::ceil(s * scale);
  }

  std::vector<double> objective(num_f + num_c * num_f);
  for (int f = 0; f < num_f; ++f) {
    objective[f] = std::round(UniformReal(rng, 100.0, 110.0) *
                                  std::sqrt(capacity[f]) +
                              UniformInt(rng, 0, 90));
  }
  for (int c = 0; c < num_c; ++c) {
    for (int f = 0; f < num_f; ++f) {
      const double dist = std::hypot(cx[c] - fx[f], cy[c] - fy[f]);
      objective[num_f + c * num_f + f] = std::round(10.0 * dist * demand[c]);
    }
  }

  MilpInstance instance;
  instance.name = absl::StrCat("facility_", num_c, "x", num_f, "_s", seed);
  instance.seed = seed;
  const int n = num_f + num_c * num_f;
  instance.objective = std::move(objective);
  instance.lower.assign(n, 0.0);
  instance.upper.assign(n, 1.0);
  instance.is_integer.assign(n, false);
  for (int f = 0; f < num_f; ++f) instance.is_integer[f] = true;

  for (int c = 0; c < num_c; ++c) {
    std::vector<int> index(num_f);
    for (int f = 0; f < num_f; ++f) index[f] = num_f + c * num_f + f;
    instance.rows.push_back(UnitRow(index, 1.0, 1.0));
    instance.rows.push_back(UnitRow(index, -1.0, -1.0));
  }
  for (int f = 0; f < num_f; ++f) {
    SparseRow row;
    row.index.push_back(f);
    row.coef.push_back(-capacity[f]);
    for (int c = 0; c < num_c; ++c) {
      row.index.push_back(num_f + c * num_f + f);
      row.coef.push_back(demand[c]);
    }
    row.rhs = 0.0;
    instance.rows.push_back(std::move(row));
  }
  return instance;
}

absl::StatusOr<MilpInstance> GenerateMultKnapsack(int items, int knapsacks,
                                                  uint64_t seed) {
  if (items < 2 || knapsacks < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "multiple knapsack needs items >= 2 and knapsacks >= 1; got ", items,
        " / ", knapsacks));
  }
  Rng rng(seed);
  std::vector<double> weight(items), value(items);
  for (int i = 0; i < items; ++i) {
    weight[i] = UniformInt(rng, 10, 100);
    value[i] = UniformInt(rng, 10, 100);
  }
  const double total_weight =
      std::accumulate(weight.begin(), weight.end(), 0.0);
  std::vector<double> capacity(knapsacks);
  for (double& cap : capacity) {
    cap = std::floor(UniformReal(rng, 0.4, 0.6) * total_weight / knapsacks);
  }

  std::vector<double> objective(items * knapsacks);
  for (int i = 0; i < items; ++i) {
    for (int k = 0; k < knapsacks; ++k) objective[i * knapsacks + k] = -value[i];
  }
  MilpInstance instance = BinaryInstance(
      absl::StrCat("knapsack_", items, "x", knapsacks, "_s", seed),
      std::move(objective), seed);
  for (int i = 0; i < items; ++i) {
    std::vector<int> index(knapsacks);
    for (int k = 0; k < knapsacks; ++k) index[k] = i * knapsacks + k;
    instance.rows.push_back(UnitRow(std::move(index), 1.0, 1.0));
  }
  for (int k = 0; k < knapsacks; ++k) {
    SparseRow row;
    for (int i = 0; i < items; ++i) {
      row.index.push_back(i * knapsacks + k);
      row.coef.push_back(weight[i]);
    }
    row.rhs = capacity[k];
    instance.rows.push_back(std::move(row));
  }
  return instance;
}

}  // namespace branchrl
