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

#include "branchrl/milp.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace branchrl {

int MilpInstance::num_integer() const {
  return static_cast<int>(
      std::count(is_integer.begin(), is_integer.end(), true));
}

std::vector<std::string> ValidateInstance(const MilpInstance& instance) {
  std::vector<std::string> report;
  const int n = instance.num_vars();

  if (static_cast<int>(instance.lower.size()) != n ||
      static_cast<int>(instance.upper.size()) != n ||
      static_cast<int>(instance.is_integer.size()) != n) {
    report.push_back(absl::StrCat("size mismatch: objective has ", n,
                                  " entries, lower ", instance.lower.size(),
                                  ", upper ", instance.upper.size(),
                                  ", integer mask ",
                                  instance.is_integer.size()));
    return report;
  }

  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(instance.objective[j])) {
      report.push_back(absl::StrCat("non-finite objective coefficient at ", j));
    }
    if (std::isnan(instance.lower[j]) || std::isnan(instance.upper[j])) {
      report.push_back(absl::StrCat("nan bound on variable ", j));
    } else if (instance.lower[j] > instance.upper[j]) {
      report.push_back(absl::StrCat("crossed bounds on variable ", j, ": ",
                                    instance.lower[j], " > ",
                                    instance.upper[j]));
    }
    if (instance.lower[j] == kInf || instance.upper[j] == -kInf) {
      report.push_back(absl::StrCat("empty domain on variable ", j));
    }
  }

  for (int i = 0; i < instance.num_cons(); ++i) {
    const SparseRow& row = instance.rows[i];
    if (row.index.size() != row.coef.size()) {
      report.push_back(absl::StrCat("row ", i, " has ", row.index.size(),
                                    " indices but ", row.coef.size(),
                                    " coefficients"));
      continue;
    }
    if (!std::isfinite(row.rhs)) {
      report.push_back(absl::StrCat("non-finite right-hand side in row ", i));
    }
    for (int k = 0; k < row.size(); ++k) {
      const int j = row.index[k];
      if (j < 0 || j >= n) {
        report.push_back(absl::StrCat("index out of range in row ", i, ": ", j,
                                      " not in [0, ", n, ")"));
      }
      if (k > 0 && row.index[k - 1] >= j) {
        report.push_back(absl::StrCat("indices not strictly increasing in row ",
                                      i, " at position ", k));
      }
      if (row.coef[k] == 0.0) {
        report.push_back(
            absl::StrCat("zero coefficient stored in row ", i, " for var ", j));
      } else if (!std::isfinite(row.coef[k])) {
        report.push_back(absl::StrCat("non-finite coefficient in row ", i,
                                      " for var ", j));
      }
    }
  }
  return report;
}

}  // namespace branchrl
