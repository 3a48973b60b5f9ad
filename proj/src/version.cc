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

#include "branchrl/version.h"

#ifndef BRANCHRL_GIT_DESCRIBE
#define BRANCHRL_GIT_DESCRIBE "unknown"
#endif

namespace branchrl {

const char* CodeVersion() { return BRANCHRL_GIT_DESCRIBE; }

}  // namespace branchrl
