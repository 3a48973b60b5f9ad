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

// Command-line front end. Kept out of main() so tests can drive it.

#ifndef BRANCHRL_TOOLS_CLI_H_
#define BRANCHRL_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace branchrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitLimit = 3;
inline constexpr int kExitNumerical = 4;

// "key=value" lines; blank lines and lines starting with '#' are skipped.
absl::StatusOr<std::vector<std::pair<std::string, std::string>>>
ParseConfigText(absl::string_view text);

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace branchrl::cli

#endif  // BRANCHRL_TOOLS_CLI_H_
