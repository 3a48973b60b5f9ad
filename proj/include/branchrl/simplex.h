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

// LP relaxation solver for a single branch-and-bound node.
//
// Dense-tableau, bounded-variable primal simplex. Phase I minimizes the sum of
// artificial variables added for rows violated by the all-at-bound start; phase
// II minimizes c'x. Pricing is Dantzig's rule until 500 degenerate pivots have
// been made, then Bland's rule for the rest of the phase. Every call starts from
// scratch, so results are a pure function of (instance, override).

#ifndef BRANCHRL_SIMPLEX_H_
#define BRANCHRL_SIMPLEX_H_

#include <map>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "branchrl/milp.h"

namespace branchrl {

inline constexpr double kFeasTol = 1e-7;
inline constexpr double kIntegralityTol = 1e-6;

// Local domain deltas of one node, applied on top of the instance bounds.
class BoundOverride {
 public:
  void Set(int var, double lower, double upper) {
    bounds_[var] = {lower, upper};
  }
  double Lower(const MilpInstance& instance, int var) const;
  double Upper(const MilpInstance& instance, int var) const;

  bool empty() const { return bounds_.empty(); }
  int size() const { return static_cast<int>(bounds_.size()); }
  const std::map<int, std::pair<double, double>>& entries() const {
    return bounds_;
  }
  bool operator==(const BoundOverride&) const = default;

 private:
  std::map<int, std::pair<double, double>> bounds_;
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = kInf;
  std::vector<double> primal;
  std::vector<double> duals;          // one per row, <= 0 for "<=" rows
  std::vector<double> reduced_costs;  // c_j - y'A_j
  std::vector<bool> basic;            // per structural variable
  int iterations = 0;

  // b'y + sum_j d_j * (bound the variable rests at); equals `objective` at an
  // optimal basis up to rounding.
  double dual_objective = kInf;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct LpOptions {
  double feas_tol = kFeasTol;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  int degenerate_pivots_before_bland = 500;
  // 0 selects a size-based limit.
  int max_iterations = 0;
};

absl::StatusOr<LpResult> SolveLp(const MilpInstance& instance,
                                 const BoundOverride& over,
                                 const LpOptions& options = {});

struct ProbeBounds {
  double down = kInf;  // objective with x_var <= floor_val, +inf if infeasible
  double up = kInf;    // objective with x_var >= ceil_val
};

absl::StatusOr<ProbeBounds> StrongBranchProbe(const MilpInstance& instance,
                                              const BoundOverride& over,
                                              int var, double floor_val,
                                              double ceil_val);

// Distance from `value` to the nearest integer.
double Fractionality(double value);

// Integer variables whose LP value is farther than kIntegralityTol from an
// integer, in increasing index order.
std::vector<int> FractionalVariables(const MilpInstance& instance,
                                     const LpResult& lp);

}  // namespace branchrl

#endif  // BRANCHRL_SIMPLEX_H_
