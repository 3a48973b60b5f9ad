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

// Data model for mixed integer linear programs in canonical form
//
//   min c'x  s.t.  row_i . x <= b_i,  l <= x <= u,  x_j integer for masked j.
//
// Maximization problems and >= / = rows are converted into this form by the
// code that builds the instance; the solver only ever sees this one shape.

#ifndef BRANCHRL_MILP_H_
#define BRANCHRL_MILP_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace branchrl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One sparse "<=" row. Indices strictly increase; no stored zeros.
struct SparseRow {
  std::vector<int> index;
  std::vector<double> coef;
  double rhs = 0.0;

  int size() const { return static_cast<int>(index.size()); }
  bool operator==(const SparseRow&) const = default;
};

struct MilpInstance {
  std::string name;
  std::vector<double> objective;
  std::vector<SparseRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> is_integer;
  uint64_t seed = 0;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_cons() const { return static_cast<int>(rows.size()); }
  int num_integer() const;

  bool operator==(const MilpInstance&) const = default;
};

// Returns one human readable entry per violated structural invariant. An empty
// result means the instance is valid. Entries start with a stable category
// phrase ("index out of range", "crossed bounds", ...) so callers can match.
std::vector<std::string> ValidateInstance(const MilpInstance& instance);

}  // namespace branchrl

#endif  // BRANCHRL_MILP_H_
