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

#include "branchrl/observation.h"

#include <algorithm>
#include <cmath>

#include "branchrl/simplex.h"

namespace branchrl {
namespace {

double Squash(double t, double at_infinity) {
  if (std::isinf(t)) return t > 0 ? at_infinity : -at_infinity;
  return t / (1.0 + std::abs(t));
}

double RowNorm(const SparseRow& row) {
  double norm = 0.0;
  for (double a : row.coef) norm = std::max(norm, std::abs(a));
  return norm > 0.0 ? norm : 1.0;
}

}  // namespace

std::shared_ptr<const GraphEdges> BuildGraphEdges(const MilpInstance& instance) {
  auto edges = std::make_shared<GraphEdges>();
  edges->n_vars = instance.num_vars();
  edges->n_cons = instance.num_cons();
  edges->cons_degree.assign(edges->n_cons, 0);
  edges->var_degree.assign(edges->n_vars, 0);
  for (int i = 0; i < instance.num_cons(); ++i) {
    const SparseRow& row = instance.rows[i];
    const double norm = RowNorm(row);
    for (int k = 0; k < row.size(); ++k) {
      edges->cons.push_back(i);
      edges->var.push_back(row.index[k]);
      edges->weight.push_back(row.coef[k] / norm);
      ++edges->cons_degree[i];
      ++edges->var_degree[row.index[k]];
    }
  }
  return edges;
}

std::vector<int> Observation::Actions() const {
  std::vector<int> actions;
  for (int j = 0; j < static_cast<int>(action_mask.size()); ++j) {
    if (action_mask[j]) actions.push_back(j);
  }
  return actions;
}

bool Observation::operator==(const Observation& other) const {
  const bool same_edges =
      edges == other.edges || (edges && other.edges && *edges == *other.edges);
  return node_id == other.node_id && var_features == other.var_features &&
         cons_features == other.cons_features &&
         action_mask == other.action_mask && same_edges;
}

Observation ExtractObservation(const MilpInstance& instance,
                               std::shared_ptr<const GraphEdges> edges,
                               const BnbNode& node) {
  const LpResult& lp = *node.lp;
  const int n = instance.num_vars();
  const int m = instance.num_cons();

  double cost_norm = 0.0;
  for (double c : instance.objective) cost_norm = std::max(cost_norm, std::abs(c));
  if (cost_norm == 0.0) cost_norm = 1.0;

  Observation obs;
  obs.node_id = node.id;
  obs.edges = std::move(edges);
  obs.var_features.resize(static_cast<size_t>(n) * kVarFeatures);
  obs.action_mask.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    const double x = lp.primal[j];
    const double lo = node.over.Lower(instance, j);
    const double hi = node.over.Upper(instance, j);
    const double frac = instance.is_integer[j] ? Fractionality(x) : 0.0;
    double* f = &obs.var_features[static_cast<size_t>(j) * kVarFeatures];
    f[0] = instance.objective[j] / cost_norm;
    f[1] = x;
    f[2] = frac;
    f[3] = std::isfinite(lo) && std::abs(x - lo) <= kFeasTol ? 1.0 : 0.0;
    f[4] = std::isfinite(hi) && std::abs(x - hi) <= kFeasTol ? 1.0 : 0.0;
    f[5] = lp.basic[j] ? 1.0 : 0.0;
    f[6] = lp.reduced_costs[j] / cost_norm;
    f[7] = Squash(lo, 1.0);
    f[8] = Squash(hi, 1.0);
    f[9] = std::isfinite(lo) && std::isfinite(hi) ? 1.0 : 0.0;
    obs.action_mask[j] = instance.is_integer[j] && frac > kIntegralityTol;
  }

  obs.cons_features.resize(static_cast<size_t>(m) * kConsFeatures);
  for (int i = 0; i < m; ++i) {
    const SparseRow& row = instance.rows[i];
    const double norm = RowNorm(row);
    double activity = 0.0;
    for (int k = 0; k < row.size(); ++k) {
      activity += row.coef[k] * lp.primal[row.index[k]];
    }
    const double slack = std::max(0.0, row.rhs - activity) / norm;
    double* f = &obs.cons_features[static_cast<size_t>(i) * kConsFeatures];
    f[0] = row.rhs / norm;
    f[1] = lp.duals[i] * norm / cost_norm;
    f[2] = slack;
    f[3] = slack <= kFeasTol ? 1.0 : 0.0;
    f[4] = n > 0 ? static_cast<double>(row.size()) / n : 0.0;
  }
  return obs;
}

}  // namespace branchrl
