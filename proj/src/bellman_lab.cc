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

#include "branchrl/bellman_lab.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "branchrl/seeds.h"

namespace branchrl {

SyntheticTreeMdp MakeSyntheticMdp(int states, double p_plus, double p_minus,
                                  double gamma, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> reward(-2.0, 0.0);
  std::uniform_int_distribution<int> child(0, states - 1);
  SyntheticTreeMdp mdp;
  mdp.p_plus = p_plus;
  mdp.p_minus = p_minus;
  mdp.gamma = gamma;
  for (int s = 0; s < states; ++s) {
    mdp.reward.push_back(reward(rng));
    mdp.plus_child.push_back(child(rng));
    mdp.minus_child.push_back(child(rng));
  }
  return mdp;
}

Realization DrawRealization(const SyntheticTreeMdp& mdp, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Realization r;
  r.plus = u(rng) < mdp.p_plus;
  r.minus = u(rng) < mdp.p_minus;
  return r;
}

std::vector<double> ApplyTreeBellman(const SyntheticTreeMdp& mdp,
                                     const std::vector<double>& v,
                                     const Realization& realization) {
  std::vector<double> out(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) {
    double children = 0.0;
    if (realization.plus) children += v[mdp.plus_child[s]];
    if (realization.minus) children += v[mdp.minus_child[s]];
    out[s] = mdp.reward[s] + mdp.gamma * children;
  }
  return out;
}

double MaxNormDistance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double d = 0.0;
  for (size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

std::vector<double> RandomValues(int states, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(states);
  for (double& x : v) x = u(rng);
  return v;
}

absl::StatusOr<ContractionSample> MeasureContraction(
    const SyntheticTreeMdp& mdp, const std::vector<double>& v,
    const std::vector<double>& u, const Realization& realization) {
  // TV - TU = gamma * sum over present children of (V - U); the rewards
  // cancel. Working on delta = V - U directly keeps every step monotone under
  // rounding, so after <= bound holds in floating point, not only in exact
  // arithmetic. Subtracting r + gamma*V from r + gamma*U can overshoot the
  // bound by an ulp.
  std::vector<double> delta(v.size());
  for (size_t k = 0; k < v.size(); ++k) delta[k] = v[k] - u[k];
  ContractionSample out;
  for (double d : delta) out.before = std::max(out.before, std::abs(d));
  if (out.before == 0.0) {
    return absl::InvalidArgumentError("V and U coincide; ratio undefined");
  }
  for (int s = 0; s < mdp.num_states(); ++s) {
    double children = 0.0;
    if (realization.plus) children += delta[mdp.plus_child[s]];
    if (realization.minus) children += delta[mdp.minus_child[s]];
    out.after = std::max(out.after, std::abs(mdp.gamma * children));
  }
  // Presence is shared, so every state has the same number of children.
  out.bound = mdp.gamma * (realization.count() * out.before);
  return out;
}

EnsembleCell RunEnsembleCell(double gamma, double p_plus, double p_minus,
                             int states, int draws, uint64_t seed) {
  EnsembleCell cell;
  cell.gamma = gamma;
  cell.p_plus = p_plus;
  cell.p_minus = p_minus;
  cell.draws = draws;
  double sum = 0.0, sum_sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    const SyntheticTreeMdp mdp = MakeSyntheticMdp(
        states, p_plus, p_minus, gamma, DeriveSeed(seed, 1, d));
    std::mt19937_64 rng(DeriveSeed(seed, 2, d));
    const std::vector<double> v = RandomValues(states, rng);
    const std::vector<double> u = RandomValues(states, rng);
    const Realization real = DrawRealization(mdp, DeriveSeed(seed, 3, d));
    const auto sample = MeasureContraction(mdp, v, u, real);
    if (!sample.ok()) continue;
    if (sample->after > sample->bound) ++cell.bound_violations;
    const double r = sample->ratio();
    sum += r;
    sum_sq += r * r;
  }
  if (draws > 0) {
    cell.mean_ratio = sum / draws;
    if (draws > 1) {
      const double var =
          std::max(0.0, (sum_sq - draws * cell.mean_ratio * cell.mean_ratio) /
                            (draws - 1));
      cell.std = std::sqrt(var);
    }
    cell.std_error = cell.std / std::sqrt(static_cast<double>(draws));
  }
  return cell;
}

std::vector<EnsembleCell> RunEnsemble(const EnsembleConfig& config) {
  std::vector<EnsembleCell> cells;
  for (double gamma : config.gammas) {
    for (double p : config.probabilities) {
      cells.push_back(RunEnsembleCell(gamma, p, p, config.states, config.draws,
                                      config.seed));
    }
  }
  return cells;
}

std::string FormatEnsembleCsv(const std::vector<EnsembleCell>& cells) {
  std::string out =
      "gamma,p_plus,p_minus,draws,mean_ratio,std,std_error,bound_violations,"
      "status\n";
  for (const EnsembleCell& c : cells) {
    const char* status = !c.contracting() ? "NA"
                         : c.flagged() || c.bound_violations > 0 ? "FAIL"
                                                                 : "PASS";
    absl::StrAppend(&out,
                    absl::StrFormat("%g,%g,%g,%d,%.6f,%.6f,%.6f,%d,%s\n",
                                    c.gamma, c.p_plus, c.p_minus, c.draws,
                                    c.mean_ratio, c.std, c.std_error,
                                    c.bound_violations, status));
  }
  return out;
}

}  // namespace branchrl
