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

// Tree DQN training: replay buffer, double targets in log space, MSLE or MSE
// loss, Adam, target-network sync and periodic validation.

#ifndef BRANCHRL_TRAINER_H_
#define BRANCHRL_TRAINER_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "branchrl/bnb.h"
#include "branchrl/generators.h"
#include "branchrl/qnetwork.h"
#include "branchrl/tree_mdp.h"

namespace branchrl {

struct Transition {
  ObservationPtr obs;
  int action = -1;
  double reward = kStepReward;
  std::vector<ObservationPtr> children;  // surviving children only
};

// Fixed-capacity ring. Slot of the k-th push is k mod capacity.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int64_t capacity);

  void Push(Transition transition);
  int64_t size() const;
  int64_t capacity() const { return capacity_; }
  int64_t pushes() const { return pushes_; }
  int64_t cursor() const { return pushes_ % capacity_; }
  const Transition& at(int64_t slot) const { return slots_[slot]; }

  // Uniform with replacement over the current contents.
  std::vector<int64_t> Sample(int batch, std::mt19937_64& rng) const;

  // Only for rebuilding a buffer: pretend `pushes` items came before.
  void SkipTo(int64_t pushes);

 private:
  int64_t capacity_;
  int64_t pushes_ = 0;
  std::vector<Transition> slots_;
};

enum class LossMode { kMsle, kMse };
const char* LossModeName(LossMode mode);
absl::StatusOr<LossMode> ParseLossMode(absl::string_view name);

struct TrainConfig {
  double gamma = 1.0;
  int64_t capacity = 100'000;
  int64_t min_fill = 1'000;
  int batch_size = 32;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int64_t total_updates = 40'000;
  int64_t target_sync = 1'000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  LossMode loss = LossMode::kMsle;
  int64_t validation_period = 5'000;
  int validation_instances = 30;
  int hidden = kDefaultHidden;
  // Training episodes stop here; the last transitions still bootstrap.
  int64_t episode_node_limit = 2'000;
  int64_t validation_node_limit = 5'000;
  GeneratorConfig generator;

  // Smaller buffer and denser validation for a single-CPU run.
  static TrainConfig DeskScale();

  absl::Status Validate() const;
};

// Every field as "key=value" lines in a fixed order.
std::string FormatTrainConfig(const TrainConfig& config);
absl::Status SetTrainOption(TrainConfig* config, absl::string_view key,
                            absl::string_view value);
// Hex FNV-1a of FormatTrainConfig.
std::string TrainConfigHash(const TrainConfig& config);

// Linear from start to end over the first half of the updates, then flat.
double EpsilonAt(const TrainConfig& config, int64_t update);

// r + gamma * sum over children of Q_target(child, a*), a* the greedy action
// of the online net on the child.
struct TreeTarget {
  double value = 0.0;
  double log_abs = 0.0;          // log|value|, the regression target
  std::vector<int> selected;     // a* per child
  std::vector<double> child_q;   // Q_target(child, a*)
};

TreeTarget ComputeTarget(const Transition& transition, const QNetwork& target,
                         const QNetwork& online, double gamma);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logit per batch element
};

// mean (logit - target)^2 with targets in log space.
LossResult MsleLoss(std::span<const double> logits,
                    std::span<const double> log_targets);
// mean (-exp(clamp(logit)) - target)^2 with targets in value space.
LossResult MseLoss(std::span<const double> logits,
                   std::span<const double> targets);

struct LossSample {
  const Observation* obs = nullptr;
  int action = -1;
  TreeTarget target;
};

// Batch loss and its gradient with respect to the network parameters
// (accumulated into `grad`, which must be zeroed by the caller).
double BatchLossAndGradient(const QNetwork& net,
                            std::span<const LossSample> batch, LossMode mode,
                            std::span<double> grad);

class Adam {
 public:
  Adam() = default;
  Adam(int size, double lr, double beta1, double beta2, double eps);
  void Step(std::span<double> params, std::span<const double> grad);

  int64_t steps() const { return t_; }
  std::vector<double>& m() { return m_; }
  std::vector<double>& v() { return v_; }
  void set_steps(int64_t t) { t_ = t; }

 private:
  double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct ValidationResult {
  double geomean = 0.0;  // over finished runs, +inf if none finished
  int limited = 0;
  std::vector<int64_t> tree_sizes;
};

// Greedy agent with DFS on every instance.
absl::StatusOr<ValidationResult> ValidateAgent(
    std::shared_ptr<const QNetwork> net,
    const std::vector<MilpInstance>& instances, const Limits& limits);

// Validation set shared by every run of a generator config.
absl::StatusOr<std::vector<MilpInstance>> ValidationInstances(
    const TrainConfig& config);

struct TrainLogRow {
  int64_t update = 0;
  int64_t episodes = 0;
  double epsilon = 0.0;
  double loss = 0.0;  // mean over the updates since the previous row
  double val_geomean = 0.0;
  int val_limited = 0;
};

std::string FormatTrainLog(const std::vector<TrainLogRow>& rows);

// Called for every transition of every sampled batch, with the target built
// for it; lets tests audit the double selection.
using TargetObserver =
    std::function<void(const Transition&, const TreeTarget&, const QNetwork&,
                       const QNetwork&)>;

class Trainer {
 public:
  // Files go to out_dir: train_log.csv, checkpoints/ckpt_<update>.qnet,
  // best.qnet, train_state.txt and run_manifest.txt.
  Trainer(TrainConfig config, uint64_t seed, std::string out_dir);

  // Continues a run from out_dir/train_state.txt.
  static absl::StatusOr<std::unique_ptr<Trainer>> Resume(
      TrainConfig config, uint64_t seed, std::string out_dir);

  // Runs until total_updates, or until `stop_after` updates have been done
  // (then saves the state and returns).
  absl::Status Run(std::optional<int64_t> stop_after = std::nullopt);

  void set_target_observer(TargetObserver observer) {
    observer_ = std::move(observer);
  }

  const QNetwork& online() const { return *online_; }
  const QNetwork& target() const { return *target_; }
  const std::vector<TrainLogRow>& log() const { return log_; }
  int64_t updates() const { return updates_; }
  int64_t episodes() const { return episodes_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  // Row with the lowest validation geometric mean, earliest on ties.
  std::optional<TrainLogRow> best() const;

  std::string SerializeState() const;

 private:
  struct EpisodeRecord {
    int64_t index = 0;
    uint64_t instance_seed = 0;
    int64_t first_push = 0;
    std::vector<int> actions;
    bool finished = false;
  };

  absl::Status StartEpisode();
  absl::Status StepEnv();
  absl::Status Update();
  absl::Status ValidateAndCheckpoint();
  absl::Status WriteOutputs() const;
  absl::Status RestoreState(absl::string_view text);
  absl::Status Replay(EpisodeRecord& record, bool keep_env);
  void DropStaleRecords();

  TrainConfig config_;
  uint64_t seed_;
  std::string out_dir_;
  std::shared_ptr<QNetwork> online_;
  std::shared_ptr<QNetwork> target_;
  Adam adam_;
  ReplayBuffer buffer_;
  std::mt19937_64 act_rng_;
  std::mt19937_64 sample_rng_;
  std::vector<MilpInstance> validation_;

  int64_t updates_ = 0;
  int64_t episodes_ = 0;
  double loss_sum_ = 0.0;
  int64_t loss_count_ = 0;
  std::vector<TrainLogRow> log_;

  std::unique_ptr<BranchingEnv> env_;
  std::deque<EpisodeRecord> records_;
  TargetObserver observer_;
};

}  // namespace branchrl

#endif  // BRANCHRL_TRAINER_H_
