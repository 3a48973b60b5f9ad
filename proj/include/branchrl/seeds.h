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

#ifndef BRANCHRL_SEEDS_H_
#define BRANCHRL_SEEDS_H_

#include <cstdint>

namespace branchrl {

// SplitMix64 finalizer.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of item `index` in stream `stream` of a run seeded with `seed`.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream, uint64_t index) {
  return SplitMix64(SplitMix64(seed ^ SplitMix64(stream)) + index);
}

// Instance seeds of the fixed validation and evaluation sets. They do not
// depend on the run seed, so every run is compared on the same instances.
inline constexpr uint64_t kValidationSeedBase = 10'000'000;
inline constexpr uint64_t kEvaluationSeedBase = 20'000'000;

}  // namespace branchrl

#endif  // BRANCHRL_SEEDS_H_
