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

// Synthetic tree MDPs for checking that the tree Bellman operator contracts
// in mean. Each state has a reward and two child states; in a realization
// each child slot is present or absent, with presence probabilities that do
// not depend on the state (one draw per slot shared by every state).

#ifndef BRANCHRL_BELLMAN_LAB_H_
#define BRANCHRL_BELLMAN_LAB_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace branchrl {

struct SyntheticTreeMdp {
  std::vector<double> reward;
  std::vector<int> plus_child;
  std::vector<int> minus_child;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double gamma = 1.0;

  int num_states() const { return static_cast<int>(reward.size()); }
};

inline constexpr int kDefaultStates = 64;

// Rewards uniform in [-2, 0], children uniform over the states.
SyntheticTreeMdp MakeSyntheticMdp(int states, double p_plus, double p_minus,
                                  double gamma, uint64_t seed);

struct Realization {
  bool plus = false;
  bool minus = false;
  int count() const { return int{plus} + int{minus}; }
};

Realization DrawRealization(const SyntheticTreeMdp& mdp, uint64_t seed);

// V'(s) = r(s) + gamma * (sum of V over the children present).
std::vector<double> ApplyTreeBellman(const SyntheticTreeMdp& mdp,
                                     const std::vector<double>& v,
                                     const Realization& realization);

double MaxNormDistance(const std::vector<double>& a,
                       const std::vector<double>& b);

// Uniform in [-10, 10].
std::vector<double> RandomValues(int states, std::mt19937_64& rng);

struct ContractionSample {
  double before = 0.0;  // ||V - U||
  double after = 0.0;   // ||TV - TU||
  // gamma * (children present at the state attaining `after`) * before.
  double bound = 0.0;
  double ratio() const { return after / before; }
};

// V and U must differ. The same realization is applied to both.
absl::StatusOr<ContractionSample> MeasureContraction(
    const SyntheticTreeMdp& mdp, const std::vector<double>& v,
    const std::vector<double>& u, const Realization& realization);

struct EnsembleCell {
  double gamma = 1.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  int draws = 0;
  double mean_ratio = 0.0;
  double std = 0.0;        // sample std of the ratios
  double std_error = 0.0;  // std / sqrt(draws)
  int64_t bound_violations = 0;
  // gamma * (p_plus + p_minus) < 1 promises a mean ratio below 1.
  bool contracting() const { return gamma * (p_plus + p_minus) < 1.0; }
  bool flagged() const { return contracting() && mean_ratio >= 1.0; }
};

struct EnsembleConfig {
  std::vector<double> gammas = {0.0, 0.5, 0.9, 1.0};
  // Each value is used for both p_plus and p_minus.
  std::vector<double> probabilities = {0.0, 0.2, 0.3, 0.4};
  int states = kDefaultStates;
  int draws = 1000;
  uint64_t seed = 0;
};

// Every draw samples a fresh MDP, V, U and realization from its own seed.
EnsembleCell RunEnsembleCell(double gamma, double p_plus, double p_minus,
                             int states, int draws, uint64_t seed);

std::vector<EnsembleCell> RunEnsemble(const EnsembleConfig& config);

// gamma,p_plus,p_minus,draws,mean_ratio,std,std_error,bound_violations,status
std::string FormatEnsembleCsv(const std::vector<EnsembleCell>& cells);

}  // namespace branchrl

#endif  // BRANCHRL_BELLMAN_LAB_H_
