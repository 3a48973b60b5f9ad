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

// Line-oriented text format for MilpInstance:
//
//   MILP v1
//   name <text>
//   seed <u64>
//   nvars N
//   ncons M
//   obj c0 c1 ...
//   lb l0 l1 ...          (-inf allowed)
//   ub u0 u1 ...          (inf allowed)
//   int b0 b1 ...         (0/1)
//   row rhs k idx:coef idx:coef ...     (M lines)
//
// Doubles are written in shortest round-trip form, so reading back yields
// bit-identical coefficients.

#ifndef BRANCHRL_INSTANCE_IO_H_
#define BRANCHRL_INSTANCE_IO_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "branchrl/milp.h"

namespace branchrl {

std::string FormatDouble(double value);
absl::StatusOr<double> ParseDouble(absl::string_view token);

std::string SerializeInstance(const MilpInstance& instance);
absl::StatusOr<MilpInstance> ParseInstance(absl::string_view text);

absl::Status WriteInstance(const MilpInstance& instance,
                           const std::string& path);
absl::StatusOr<MilpInstance> ReadInstance(const std::string& path);

// Whole-file helpers shared by the other on-disk formats.
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace branchrl

#endif  // BRANCHRL_INSTANCE_IO_H_
