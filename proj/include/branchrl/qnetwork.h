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

// Bipartite graph-convolution Q-network with hand-written gradients.
//
//   V0 = relu(Xv Wv' + bv)                       variable embedding
//   C0 = relu(Xc Wc' + bc)                       constraint embedding
//   C1 = relu(C0 Ws1' + mean_j(w_ij V0_j) Wn1' + b1)   variables -> rows
//   V1 = relu(V0 Ws2' + mean_i(w_ij C1_i) Wn2' + b2)   rows -> variables
//   logit = V1 wo + bo,   Q = -exp(logit)
//
// Means run over graph neighbours; isolated nodes aggregate to zero. Because
// -exp is strictly decreasing, the greedy action is the masked argmin of the
// logits, and log|Q| is the logit itself.

#ifndef BRANCHRL_QNETWORK_H_
#define BRANCHRL_QNETWORK_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "branchrl/observation.h"

namespace branchrl {

inline constexpr int kDefaultHidden = 32;
// Logits are clamped to +-kLogitClamp before any exponentiation.
inline constexpr double kLogitClamp = 30.0;

// Offsets of each parameter block inside the flat vector. Matrices are
// row-major [out][in].
struct QLayout {
  int hidden = 0;
  int var_w = 0, var_b = 0;
  int cons_w = 0, cons_b = 0;
  int c_self = 0, c_nbr = 0, c_b = 0;
  int v_self = 0, v_nbr = 0, v_b = 0;
  int out_w = 0, out_b = 0;
  int total = 0;

  static QLayout For(int hidden);
};

// Intermediate activations kept for the backward pass.
struct ForwardCache {
  std::vector<double> var_pre, var0;    // n x H
  std::vector<double> cons_pre, cons0;  // m x H
  std::vector<double> cons_agg;         // m x H
  std::vector<double> cons_pre1, cons1;
  std::vector<double> var_agg;          // n x H
  std::vector<double> var_pre1, var1;
};

struct QOutput {
  std::vector<double> logits;
  std::vector<double> q_values;  // -exp(clamped logit)
  int best = -1;                 // masked argmin of logits, -1 if none
};

class QNetwork {
 public:
  explicit QNetwork(int hidden = kDefaultHidden);

  int hidden() const { return layout_.hidden; }
  const QLayout& layout() const { return layout_; }
  int num_params() const { return layout_.total; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  QOutput Forward(const Observation& obs, ForwardCache* cache = nullptr) const;

  // Adds d(sum_a upstream[a] * logit[a]) / d(params) into `grad`. `cache`
  // must come from Forward on the same observation and parameters.
  void Backward(const Observation& obs, const ForwardCache& cache,
                std::span<const double> upstream,
                std::span<double> grad) const;

  bool operator==(const QNetwork& other) const {
    return layout_.hidden == other.layout_.hidden && params_ == other.params_;
  }

 private:
  QLayout layout_;
  std::vector<double> params_;
};

// Glorot-uniform weights, zero biases.
QNetwork InitQNetwork(uint64_t seed, int hidden = kDefaultHidden);

// Lowest-index argmin of `logits` over mask bits; -1 if the mask is empty.
int MaskedArgmin(std::span<const double> logits,
                 std::span<const uint8_t> mask);

double ClampLogit(double logit);

// With probability epsilon a uniform masked action, otherwise the greedy one.
// Always consumes one uniform draw so the rng stream does not depend on
// epsilon.
int ActEpsilonGreedy(const QNetwork& net, const Observation& obs,
                     double epsilon, std::mt19937_64& rng);

// "QNET v1", a dims line, then one parameter per line in layout order.
std::string SerializeQNetwork(const QNetwork& net);
absl::StatusOr<QNetwork> ParseQNetwork(absl::string_view text);
absl::Status SaveQNetwork(const QNetwork& net, const std::string& path);
absl::StatusOr<QNetwork> LoadQNetwork(const std::string& path);

}  // namespace branchrl

#endif  // BRANCHRL_QNETWORK_H_
