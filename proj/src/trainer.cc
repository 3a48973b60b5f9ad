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

#include "branchrl/trainer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "branchrl/agent_rule.h"
#include "branchrl/eval_bench.h"
#include "branchrl/instance_io.h"
#include "branchrl/seeds.h"
#include "branchrl/status_macros.h"
#include "branchrl/version.h"

namespace branchrl {

// ---------------------------------------------------------------- replay

ReplayBuffer::ReplayBuffer(int64_t capacity)
    : capacity_(std::max<int64_t>(capacity, 1)), slots_(capacity_) {}

void ReplayBuffer::Push(Transition transition) {
  slots_[pushes_ % capacity_] = std::move(transition);
  ++pushes_;
}

int64_t ReplayBuffer::size() const { return std::min(pushes_, capacity_); }

std::vector<int64_t> ReplayBuffer::Sample(int batch,
                                          std::mt19937_64& rng) const {
  std::uniform_int_distribution<int64_t> pick(0, size() - 1);
  std::vector<int64_t> out(batch);
  for (int64_t& slot : out) slot = pick(rng);
  return out;
}

void ReplayBuffer::SkipTo(int64_t pushes) { pushes_ = pushes; }

// ---------------------------------------------------------------- config

const char* LossModeName(LossMode mode) {
  return mode == LossMode::kMsle ? "msle" : "mse";
}

absl::StatusOr<LossMode> ParseLossMode(absl::string_view name) {
  if (name == "msle") return LossMode::kMsle;
  if (name == "mse") return LossMode::kMse;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown loss '", name, "', expected msle or mse"));
}

TrainConfig TrainConfig::DeskScale() {
  TrainConfig config;
  config.capacity = 20'000;
  config.total_updates = 40'000;
  config.validation_period = 2'000;
  return config;
}

absl::Status TrainConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in (0, 1]");
  }
  if (capacity < 1 || min_fill < 1 || min_fill > capacity) {
    return absl::InvalidArgumentError("need 1 <= min_fill <= capacity");
  }
  if (batch_size < 1 || batch_size > min_fill) {
    return absl::InvalidArgumentError("need 1 <= batch_size <= min_fill");
  }
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning_rate must be positive");
  }
  if (total_updates < 0 || target_sync < 1 || validation_period < 1) {
    return absl::InvalidArgumentError(
        "updates must be >= 0, target_sync and validation_period >= 1");
  }
  if (validation_instances < 1 || hidden < 1) {
    return absl::InvalidArgumentError("validation_instances, hidden >= 1");
  }
  if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 ||
      epsilon_end > 1) {
    return absl::InvalidArgumentError("epsilon must lie in [0, 1]");
  }
  if (episode_node_limit < 3 || validation_node_limit < 3) {
    return absl::InvalidArgumentError("node limits must be >= 3");
  }
  return absl::OkStatus();
}

namespace {

struct Option {
  const char* key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<absl::Status(TrainConfig&, absl::string_view)> set;
};

template <typename T>
absl::Status ParseInto(absl::string_view text, T* out) {
  if constexpr (std::is_floating_point_v<T>) {
    ASSIGN_OR_RETURN(*out, ParseDouble(text));
    return absl::OkStatus();
  } else {
    if (!absl::SimpleAtoi(text, out)) {
      return absl::InvalidArgumentError(
          absl::StrCat("expected an integer, got '", text, "'"));
    }
    return absl::OkStatus();
  }
}

template <typename T>
std::string Show(T value) {
  if constexpr (std::is_floating_point_v<T>) {
    return FormatDouble(value);
  } else {
    return absl::StrCat(value);
  }
}

template <typename T>
Option Field(const char* key, T TrainConfig::*member) {
  return {key, [member](const TrainConfig& c) { return Show(c.*member); },
          [member](TrainConfig& c, absl::string_view v) {
            return ParseInto(v, &(c.*member));
          }};
}

template <typename T>
Option GenField(const char* key, T GeneratorConfig::*member) {
  return {key,
          [member](const TrainConfig& c) { return Show(c.generator.*member); },
          [member](TrainConfig& c, absl::string_view v) {
            return ParseInto(v, &(c.generator.*member));
          }};
}

const std::vector<Option>& Options() {
  static const auto* options = new std::vector<Option>{
      {"family",
       [](const TrainConfig& c) {
         return std::string(FamilyName(c.generator.family));
       },
       [](TrainConfig& c, absl::string_view v) -> absl::Status {
         ASSIGN_OR_RETURN(c.generator.family, ParseFamily(v));
         return absl::OkStatus();
       }},
      {"loss", [](const TrainConfig& c) { return LossModeName(c.loss); },
       [](TrainConfig& c, absl::string_view v) -> absl::Status {
         ASSIGN_OR_RETURN(c.loss, ParseLossMode(v));
         return absl::OkStatus();
       }},
      Field("gamma", &TrainConfig::gamma),
      Field("capacity", &TrainConfig::capacity),
      Field("min_fill", &TrainConfig::min_fill),
      Field("batch_size", &TrainConfig::batch_size),
      Field("learning_rate", &TrainConfig::learning_rate),
      Field("adam_beta1", &TrainConfig::adam_beta1),
      Field("adam_beta2", &TrainConfig::adam_beta2),
      Field("adam_eps", &TrainConfig::adam_eps),
      Field("updates", &TrainConfig::total_updates),
      Field("target_sync", &TrainConfig::target_sync),
      Field("epsilon_start", &TrainConfig::epsilon_start),
      Field("epsilon_end", &TrainConfig::epsilon_end),
      Field("validation_period", &TrainConfig::validation_period),
      Field("validation_instances", &TrainConfig::validation_instances),
      Field("hidden", &TrainConfig::hidden),
      Field("episode_node_limit", &TrainConfig::episode_node_limit),
      Field("validation_node_limit", &TrainConfig::validation_node_limit),
      GenField("setcover_rows", &GeneratorConfig::set_cover_rows),
      GenField("setcover_cols", &GeneratorConfig::set_cover_cols),
      GenField("setcover_density", &GeneratorConfig::set_cover_density),
      GenField("auction_items", &GeneratorConfig::auction_items),
      GenField("auction_bids", &GeneratorConfig::auction_bids),
      GenField("indset_nodes", &GeneratorConfig::indset_nodes),
      GenField("indset_edge_prob", &GeneratorConfig::indset_edge_prob),
      GenField("facility_customers", &GeneratorConfig::facility_customers),
      GenField("facility_facilities", &GeneratorConfig::facility_facilities),
      GenField("knapsack_items", &GeneratorConfig::knapsack_items),
      GenField("knapsack_count", &GeneratorConfig::knapsack_count),
  };
  return *options;
}

}  // namespace

std::string FormatTrainConfig(const TrainConfig& config) {
  std::string out;
  for (const Option& o : Options()) {
    absl::StrAppend(&out, o.key, "=", o.get(config), "\n");
  }
  return out;
}

absl::Status SetTrainOption(TrainConfig* config, absl::string_view key,
                            absl::string_view value) {
  for (const Option& o : Options()) {
    if (key == o.key) {
      const absl::Status s = o.set(*config, value);
      if (!s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("option ", key, ": ", s.message()));
      }
      return absl::OkStatus();
    }
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown option '", key, "'"));
}

std::string TrainConfigHash(const TrainConfig& config) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : FormatTrainConfig(config)) {
    h = (h ^ ch) * 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

double EpsilonAt(const TrainConfig& config, int64_t update) {
  const double half = config.total_updates / 2.0;
  if (half <= 0 || update >= half) return config.epsilon_end;
  const double frac = update / half;
  return config.epsilon_start +
         (config.epsilon_end - config.epsilon_start) * frac;
}

// ---------------------------------------------------------------- targets

TreeTarget ComputeTarget(const Transition& transition, const QNetwork& target,
                         const QNetwork& online, double gamma) {
  TreeTarget out;
  double sum = 0.0;
  for (const ObservationPtr& child : transition.children) {
    const int a = online.Forward(*child).best;
    double q = 0.0;
    if (a >= 0) q = target.Forward(*child).q_values[a];
    out.selected.push_back(a);
    out.child_q.push_back(q);
    sum += q;
  }
  out.value = transition.reward + gamma * sum;
  out.log_abs = std::log(std::abs(out.value));
  return out;
}

LossResult MsleLoss(std::span<const double> logits,
                    std::span<const double> log_targets) {
  LossResult r;
  const double b = logits.size();
  r.grad.resize(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    const double d = logits[i] - log_targets[i];
    r.loss += d * d / b;
    r.grad[i] = 2.0 * d / b;
  }
  return r;
}

LossResult MseLoss(std::span<const double> logits,
                   std::span<const double> targets) {
  LossResult r;
  const double b = logits.size();
  r.grad.resize(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    const double l = ClampLogit(logits[i]);
    const double q = -std::exp(l);
    const double d = q - targets[i];
    r.loss += d * d / b;
    // The clamp is flat outside its range.
    const double dq = std::abs(logits[i]) < kLogitClamp ? q : 0.0;
    r.grad[i] = 2.0 * d / b * dq;
  }
  return r;
}

double BatchLossAndGradient(const QNetwork& net,
                            std::span<const LossSample> batch, LossMode mode,
                            std::span<double> grad) {
  const size_t b = batch.size();
  std::vector<ForwardCache> caches(b);
  std::vector<double> logits(b), targets(b);
  for (size_t i = 0; i < b; ++i) {
    logits[i] = net.Forward(*batch[i].obs, &caches[i]).logits[batch[i].action];
    targets[i] = mode == LossMode::kMsle ? batch[i].target.log_abs
                                         : batch[i].target.value;
  }
  const LossResult r = mode == LossMode::kMsle ? MsleLoss(logits, targets)
                                               : MseLoss(logits, targets);
  for (size_t i = 0; i < b; ++i) {
    std::vector<double> upstream(batch[i].obs->n_vars(), 0.0);
    upstream[batch[i].action] = r.grad[i];
    net.Backward(*batch[i].obs, caches[i], upstream, grad);
  }
  return r.loss;
}

// ---------------------------------------------------------------- adam

Adam::Adam(int size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size), v_(size) {}

void Adam::Step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

// ---------------------------------------------------------------- validation

absl::StatusOr<ValidationResult> ValidateAgent(
    std::shared_ptr<const QNetwork> net,
    const std::vector<MilpInstance>& instances, const Limits& limits) {
  if (instances.empty()) return absl::InvalidArgumentError("no instances");
  ValidationResult out;
  std::vector<double> finished;
  AgentRule rule(std::move(net));
  for (const MilpInstance& inst : instances) {
    ASSIGN_OR_RETURN(SolveResult r,
                     Solve(inst, rule, NodeSelection::kDepthFirst, limits, 0));
    out.tree_sizes.push_back(r.tree_size);
    if (r.status == SolveStatus::kNodeLimit) {
      ++out.limited;
    } else {
      finished.push_back(static_cast<double>(r.tree_size));
    }
  }
  if (finished.empty()) {
    out.geomean = std::numeric_limits<double>::infinity();
  } else {
    ASSIGN_OR_RETURN(out.geomean, GeometricMean(finished));
  }
  return out;
}

absl::StatusOr<std::vector<MilpInstance>> ValidationInstances(
    const TrainConfig& config) {
  std::vector<MilpInstance> out;
  for (int i = 0; i < config.validation_instances; ++i) {
    ASSIGN_OR_RETURN(MilpInstance inst,
                     Generate(config.generator, kValidationSeedBase + i));
    out.push_back(std::move(inst));
  }
  return out;
}

std::string FormatTrainLog(const std::vector<TrainLogRow>& rows) {
  std::string out = "update,episodes,epsilon,loss,val_geomean,val_limited\n";
  for (const TrainLogRow& r : rows) {
    absl::StrAppend(&out, r.update, ",", r.episodes, ",",
                    absl::StrFormat("%.6f,%.8g,%.6f", r.epsilon, r.loss,
                                    r.val_geomean),
                    ",", r.val_limited, "\n");
  }
  return out;
}

// ---------------------------------------------------------------- trainer

namespace {

constexpr uint64_t kInitStream = 1;
constexpr uint64_t kActStream = 2;
constexpr uint64_t kSampleStream = 3;
constexpr uint64_t kEpisodeStream = 4;
constexpr absl::string_view kStateHeader = "TRAINSTATE v1";

std::string CheckpointName(int64_t update) {
  return absl::StrFormat("checkpoints/ckpt_%06d.qnet", update);
}

std::string JoinDoubles(const std::vector<double>& values) {
  std::string out = absl::StrCat(values.size());
  for (double v : values) absl::StrAppend(&out, " ", FormatDouble(v));
  return out;
}

absl::Status ParseDoubles(const std::vector<absl::string_view>& tokens,
                          std::vector<double>* out) {
  size_t n = 0;
  if (tokens.size() < 2 || !absl::SimpleAtoi(tokens[1], &n) ||
      tokens.size() != n + 2) {
    return absl::DataLossError(
        absl::StrCat("bad vector line '", tokens[0], "'"));
  }
  out->resize(n);
  for (size_t k = 0; k < n; ++k) {
    ASSIGN_OR_RETURN((*out)[k], ParseDouble(tokens[k + 2]));
  }
  return absl::OkStatus();
}

std::string RngState(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

absl::Status SetRngState(absl::string_view text, std::mt19937_64* rng) {
  std::istringstream is{std::string(text)};
  is >> *rng;
  if (is.fail()) return absl::DataLossError("bad rng state");
  return absl::OkStatus();
}

}  // namespace

Trainer::Trainer(TrainConfig config, uint64_t seed, std::string out_dir)
    : config_(std::move(config)),
      seed_(seed),
      out_dir_(std::move(out_dir)),
      online_(std::make_shared<QNetwork>(
          InitQNetwork(DeriveSeed(seed, kInitStream, 0), config_.hidden))),
      target_(std::make_shared<QNetwork>(*online_)),
      adam_(online_->num_params(), config_.learning_rate, config_.adam_beta1,
            config_.adam_beta2, config_.adam_eps),
      buffer_(config_.capacity),
      act_rng_(DeriveSeed(seed, kActStream, 0)),
      sample_rng_(DeriveSeed(seed, kSampleStream, 0)) {}

std::optional<TrainLogRow> Trainer::best() const {
  std::optional<TrainLogRow> best;
  for (const TrainLogRow& r : log_) {
    if (!best || r.val_geomean < best->val_geomean) best = r;
  }
  return best;
}

absl::Status Trainer::Run(std::optional<int64_t> stop_after) {
  RETURN_IF_ERROR(config_.Validate());
  if (validation_.empty()) {
    ASSIGN_OR_RETURN(validation_, ValidationInstances(config_));
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir_ + "/checkpoints", ec);
  if (ec) return absl::InternalError(absl::StrCat(out_dir_, ": ", ec.message()));
  if (log_.empty()) {
    RETURN_IF_ERROR(WriteFile(
        out_dir_ + "/run_manifest.txt",
        absl::StrCat("seed=", seed_, "\nconfig_hash=", TrainConfigHash(config_),
                     "\ncode_version=", CodeVersion(), "\n",
                     FormatTrainConfig(config_))));
    RETURN_IF_ERROR(ValidateAndCheckpoint());
  }
  while (updates_ < config_.total_updates) {
    if (stop_after && updates_ >= *stop_after) {
      return WriteFile(out_dir_ + "/train_state.txt", SerializeState());
    }
    if (env_ == nullptr || env_->done()) {
      RETURN_IF_ERROR(StartEpisode());
      continue;
    }
    RETURN_IF_ERROR(StepEnv());
    if (buffer_.size() >= config_.min_fill) RETURN_IF_ERROR(Update());
  }
  return WriteOutputs();
}

absl::Status Trainer::StartEpisode() {
  env_.reset();
  const int64_t index = episodes_++;
  const uint64_t instance_seed = DeriveSeed(seed_, kEpisodeStream, index);
  auto instance = Generate(config_.generator, instance_seed);
  if (!instance.ok()) {
    std::cerr << "episode " << index << ": " << instance.status() << "\n";
    return absl::OkStatus();
  }
  Limits limits;
  limits.node_limit = config_.episode_node_limit;
  auto env = std::make_unique<BranchingEnv>(*std::move(instance), limits,
                                            NodeSelection::kDepthFirst);
  auto root = env->Reset();
  if (!root.ok()) {
    std::cerr << "episode " << index << ": " << root.status() << "\n";
    return absl::OkStatus();
  }
  if (*root == nullptr) return absl::OkStatus();  // solved at the root
  env_ = std::move(env);
  records_.push_back({index, instance_seed, buffer_.pushes(), {}, false});
  return absl::OkStatus();
}

absl::Status Trainer::StepEnv() {
  const ObservationPtr obs = env_->current();
  const int action = ActEpsilonGreedy(*online_, *obs,
                                      EpsilonAt(config_, updates_), act_rng_);
  EpisodeRecord& record = records_.back();
  auto step = env_->Step(action);
  if (!step.ok()) {
    std::cerr << "episode " << record.index << " aborted: " << step.status()
              << "\n";
    record.finished = true;
    env_.reset();
    return absl::OkStatus();
  }
  buffer_.Push({obs, action, step->reward, std::move(step->children)});
  record.actions.push_back(action);
  if (step->done()) record.finished = true;
  DropStaleRecords();
  return absl::OkStatus();
}

void Trainer::DropStaleRecords() {
  const int64_t oldest = buffer_.pushes() - buffer_.capacity();
  while (records_.size() > 1) {
    const EpisodeRecord& r = records_.front();
    if (r.first_push + static_cast<int64_t>(r.actions.size()) > oldest) break;
    records_.pop_front();
  }
}

absl::Status Trainer::Update() {
  const std::vector<int64_t> slots =
      buffer_.Sample(config_.batch_size, sample_rng_);
  std::vector<LossSample> batch;
  batch.reserve(slots.size());
  for (int64_t slot : slots) {
    const Transition& tr = buffer_.at(slot);
    LossSample s;
    s.obs = tr.obs.get();
    s.action = tr.action;
    s.target = ComputeTarget(tr, *target_, *online_, config_.gamma);
    if (observer_) observer_(tr, s.target, *online_, *target_);
    batch.push_back(std::move(s));
  }
  std::vector<double> grad(online_->num_params(), 0.0);
  const double loss =
      BatchLossAndGradient(*online_, batch, config_.loss, grad);
  if (!std::isfinite(loss)) {
    return absl::InternalError(
        absl::StrCat("non-finite loss at update ", updates_));
  }
  adam_.Step(online_->params(), grad);
  loss_sum_ += loss;
  ++loss_count_;
  ++updates_;
  if (updates_ % config_.target_sync == 0) *target_ = *online_;
  if (updates_ % config_.validation_period == 0 ||
      updates_ == config_.total_updates) {
    RETURN_IF_ERROR(ValidateAndCheckpoint());
  }
  return absl::OkStatus();
}

absl::Status Trainer::ValidateAndCheckpoint() {
  Limits limits;
  limits.node_limit = config_.validation_node_limit;
  ASSIGN_OR_RETURN(
      ValidationResult v,
      ValidateAgent(std::make_shared<const QNetwork>(*online_), validation_,
                    limits));
  TrainLogRow row;
  row.update = updates_;
  row.episodes = episodes_;
  row.epsilon = EpsilonAt(config_, updates_);
  row.loss = loss_count_ > 0 ? loss_sum_ / loss_count_ : 0.0;
  row.val_geomean = v.geomean;
  row.val_limited = v.limited;
  log_.push_back(row);
  loss_sum_ = 0.0;
  loss_count_ = 0;
  RETURN_IF_ERROR(
      SaveQNetwork(*online_, out_dir_ + "/" + CheckpointName(updates_)));
  RETURN_IF_ERROR(
      WriteFile(out_dir_ + "/train_log.csv", FormatTrainLog(log_)));
  return WriteFile(out_dir_ + "/train_state.txt", SerializeState());
}

absl::Status Trainer::WriteOutputs() const {
  const std::optional<TrainLogRow> b = best();
  if (!b) return absl::InternalError("no validation rows");
  ASSIGN_OR_RETURN(QNetwork net,
                   LoadQNetwork(out_dir_ + "/" + CheckpointName(b->update)));
  RETURN_IF_ERROR(SaveQNetwork(net, out_dir_ + "/best.qnet"));
  RETURN_IF_ERROR(WriteFile(
      out_dir_ + "/best_checkpoint.txt",
      absl::StrCat(CheckpointName(b->update), " update ", b->update,
                   " val_geomean ", absl::StrFormat("%.6f", b->val_geomean),
                   "\n")));
  return WriteFile(out_dir_ + "/train_state.txt", SerializeState());
}

// ---------------------------------------------------------------- state

std::string Trainer::SerializeState() const {
  std::string out = absl::StrCat(kStateHeader, "\n");
  absl::StrAppend(&out, "config_hash ", TrainConfigHash(config_), "\n");
  absl::StrAppend(&out, "seed ", seed_, "\n");
  absl::StrAppend(&out, "updates ", updates_, "\n");
  absl::StrAppend(&out, "episodes ", episodes_, "\n");
  absl::StrAppend(&out, "loss ", FormatDouble(loss_sum_), " ", loss_count_,
                  "\n");
  absl::StrAppend(&out, "pushes ", buffer_.pushes(), "\n");
  absl::StrAppend(&out, "act_rng ", RngState(act_rng_), "\n");
  absl::StrAppend(&out, "sample_rng ", RngState(sample_rng_), "\n");
  Adam adam = adam_;
  absl::StrAppend(&out, "adam_t ", adam.steps(), "\n");
  absl::StrAppend(&out, "online ", JoinDoubles(online_->params()), "\n");
  absl::StrAppend(&out, "target ", JoinDoubles(target_->params()), "\n");
  absl::StrAppend(&out, "adam_m ", JoinDoubles(adam.m()), "\n");
  absl::StrAppend(&out, "adam_v ", JoinDoubles(adam.v()), "\n");
  absl::StrAppend(&out, "log ", log_.size(), "\n");
  for (const TrainLogRow& r : log_) {
    absl::StrAppend(&out, "row ", r.update, " ", r.episodes, " ",
                    FormatDouble(r.epsilon), " ", FormatDouble(r.loss), " ",
                    FormatDouble(r.val_geomean), " ", r.val_limited, "\n");
  }
  absl::StrAppend(&out, "records ", records_.size(), "\n");
  for (const EpisodeRecord& r : records_) {
    absl::StrAppend(&out, "record ", r.index, " ", r.instance_seed, " ",
                    r.first_push, " ", r.finished ? 1 : 0, " ",
                    r.actions.size());
    for (int a : r.actions) absl::StrAppend(&out, " ", a);
    absl::StrAppend(&out, "\n");
  }
  return out;
}

absl::StatusOr<std::unique_ptr<Trainer>> Trainer::Resume(TrainConfig config,
                                                         uint64_t seed,
                                                         std::string out_dir) {
  RETURN_IF_ERROR(config.Validate());
  ASSIGN_OR_RETURN(std::string text, ReadFile(out_dir + "/train_state.txt"));
  auto trainer =
      std::make_unique<Trainer>(std::move(config), seed, std::move(out_dir));
  RETURN_IF_ERROR(trainer->RestoreState(text));
  return trainer;
}

absl::Status Trainer::RestoreState(absl::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.empty() || lines[0] != kStateHeader) {
    return absl::DataLossError("not a training state file");
  }
  size_t next = 1;
  auto take = [&](absl::string_view key)
      -> absl::StatusOr<std::vector<absl::string_view>> {
    if (next >= lines.size()) {
      return absl::DataLossError(absl::StrCat("missing '", key, "'"));
    }
    std::vector<absl::string_view> tokens =
        absl::StrSplit(lines[next++], ' ', absl::SkipEmpty());
    if (tokens.empty() || tokens[0] != key) {
      return absl::DataLossError(absl::StrCat("expected '", key, "'"));
    }
    return tokens;
  };
  auto int_field = [&](absl::string_view key, auto* out) -> absl::Status {
    ASSIGN_OR_RETURN(auto tokens, take(key));
    if (tokens.size() != 2 || !absl::SimpleAtoi(tokens[1], out)) {
      return absl::DataLossError(absl::StrCat("bad '", key, "'"));
    }
    return absl::OkStatus();
  };
  auto rest_of = [&](absl::string_view key) -> absl::StatusOr<absl::string_view> {
    if (next >= lines.size() || !absl::StartsWith(lines[next], key)) {
      return absl::DataLossError(absl::StrCat("expected '", key, "'"));
    }
    return lines[next++].substr(key.size() + 1);
  };

  ASSIGN_OR_RETURN(auto hash, take("config_hash"));
  if (hash.size() != 2 || hash[1] != TrainConfigHash(config_)) {
    return absl::FailedPreconditionError(
        "training state was written with a different configuration");
  }
  uint64_t seed = 0;
  RETURN_IF_ERROR(int_field("seed", &seed));
  if (seed != seed_) {
    return absl::FailedPreconditionError(
        "training state was written with a different seed");
  }
  RETURN_IF_ERROR(int_field("updates", &updates_));
  RETURN_IF_ERROR(int_field("episodes", &episodes_));
  {
    ASSIGN_OR_RETURN(auto tokens, take("loss"));
    if (tokens.size() != 3 || !absl::SimpleAtoi(tokens[2], &loss_count_)) {
      return absl::DataLossError("bad 'loss'");
    }
    ASSIGN_OR_RETURN(loss_sum_, ParseDouble(tokens[1]));
  }
  int64_t pushes = 0;
  RETURN_IF_ERROR(int_field("pushes", &pushes));
  ASSIGN_OR_RETURN(absl::string_view act, rest_of("act_rng"));
  RETURN_IF_ERROR(SetRngState(act, &act_rng_));
  ASSIGN_OR_RETURN(absl::string_view sample, rest_of("sample_rng"));
  RETURN_IF_ERROR(SetRngState(sample, &sample_rng_));
  int64_t adam_t = 0;
  RETURN_IF_ERROR(int_field("adam_t", &adam_t));
  adam_.set_steps(adam_t);
  const size_t n = online_->num_params();
  for (auto [key, dest] :
       {std::pair<absl::string_view, std::vector<double>*>{
            "online", &online_->params()},
        {"target", &target_->params()},
        {"adam_m", &adam_.m()},
        {"adam_v", &adam_.v()}}) {
    ASSIGN_OR_RETURN(auto tokens, take(key));
    RETURN_IF_ERROR(ParseDoubles(tokens, dest));
    if (dest->size() != n) {
      return absl::DataLossError(absl::StrCat("'", key, "' has wrong size"));
    }
  }
  size_t rows = 0;
  RETURN_IF_ERROR(int_field("log", &rows));
  log_.clear();
  for (size_t k = 0; k < rows; ++k) {
    ASSIGN_OR_RETURN(auto t, take("row"));
    TrainLogRow r;
    if (t.size() != 7 || !absl::SimpleAtoi(t[1], &r.update) ||
        !absl::SimpleAtoi(t[2], &r.episodes) ||
        !absl::SimpleAtoi(t[6], &r.val_limited)) {
      return absl::DataLossError("bad log row");
    }
    ASSIGN_OR_RETURN(r.epsilon, ParseDouble(t[3]));
    ASSIGN_OR_RETURN(r.loss, ParseDouble(t[4]));
    ASSIGN_OR_RETURN(r.val_geomean, ParseDouble(t[5]));
    log_.push_back(r);
  }
  size_t n_records = 0;
  RETURN_IF_ERROR(int_field("records", &n_records));
  records_.clear();
  for (size_t k = 0; k < n_records; ++k) {
    ASSIGN_OR_RETURN(auto t, take("record"));
    EpisodeRecord r;
    int finished = 0;
    size_t n_actions = 0;
    if (t.size() < 6 || !absl::SimpleAtoi(t[1], &r.index) ||
        !absl::SimpleAtoi(t[2], &r.instance_seed) ||
        !absl::SimpleAtoi(t[3], &r.first_push) ||
        !absl::SimpleAtoi(t[4], &finished) ||
        !absl::SimpleAtoi(t[5], &n_actions) || t.size() != 6 + n_actions) {
      return absl::DataLossError("bad episode record");
    }
    r.finished = finished != 0;
    r.actions.resize(n_actions);
    for (size_t a = 0; a < n_actions; ++a) {
      if (!absl::SimpleAtoi(t[6 + a], &r.actions[a])) {
        return absl::DataLossError("bad action");
      }
    }
    records_.push_back(std::move(r));
  }

  // Rebuild the replay buffer by re-running the logged episodes.
  ASSIGN_OR_RETURN(validation_, ValidationInstances(config_));
  buffer_.SkipTo(records_.empty() ? pushes : records_.front().first_push);
  env_.reset();
  for (size_t k = 0; k < records_.size(); ++k) {
    RETURN_IF_ERROR(Replay(records_[k], k + 1 == records_.size()));
  }
  if (buffer_.pushes() != pushes) {
    return absl::DataLossError(absl::StrCat("replayed ", buffer_.pushes(),
                                            " transitions, expected ", pushes));
  }
  return absl::OkStatus();
}

absl::Status Trainer::Replay(EpisodeRecord& record, bool keep_env) {
  if (buffer_.pushes() != record.first_push) {
    return absl::DataLossError("episode records are not contiguous");
  }
  ASSIGN_OR_RETURN(MilpInstance instance,
                   Generate(config_.generator, record.instance_seed));
  Limits limits;
  limits.node_limit = config_.episode_node_limit;
  auto env = std::make_unique<BranchingEnv>(std::move(instance), limits,
                                            NodeSelection::kDepthFirst);
  ASSIGN_OR_RETURN(ObservationPtr obs, env->Reset());
  for (int action : record.actions) {
    if (obs == nullptr) return absl::DataLossError("replay ran past the end");
    ASSIGN_OR_RETURN(EnvStep step, env->Step(action));
    buffer_.Push({obs, action, step.reward, step.children});
    obs = step.next;
  }
  if (keep_env && !record.finished) env_ = std::move(env);
  return absl::OkStatus();
}

}  // namespace branchrl
