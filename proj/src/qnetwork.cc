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

#include "branchrl/qnetwork.h"

#include <algorithm>
#include <cmath>

#include "Eigen/Core"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "branchrl/instance_io.h"
#include "branchrl/status_macros.h"

namespace branchrl {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<Mat>;
using CMapM = Eigen::Map<const Mat>;
using CMapV = Eigen::Map<const Eigen::RowVectorXd>;
using MapV = Eigen::Map<Eigen::RowVectorXd>;

constexpr absl::string_view kHeader = "QNET v1";

void Relu(const std::vector<double>& in, std::vector<double>& out) {
  out.resize(in.size());
  for (size_t k = 0; k < in.size(); ++k) out[k] = in[k] > 0.0 ? in[k] : 0.0;
}

// dst[k] *= (pre[k] > 0)
void ReluBackward(const std::vector<double>& pre, Mat& grad) {
  double* g = grad.data();
  for (size_t k = 0; k < pre.size(); ++k) {
    if (!(pre[k] > 0.0)) g[k] = 0.0;
  }
}

// Mean of weighted neighbour rows: dst[to] = sum w * src[from] / deg[to].
void Aggregate(const std::vector<int>& to, const std::vector<int>& from,
               const std::vector<double>& weight, const std::vector<int>& degree,
               const double* src, int hidden, std::vector<double>& dst) {
  dst.assign(degree.size() * hidden, 0.0);
  for (size_t k = 0; k < to.size(); ++k) {
    const double w = weight[k];
    const double* s = src + static_cast<size_t>(from[k]) * hidden;
    double* d = dst.data() + static_cast<size_t>(to[k]) * hidden;
    for (int h = 0; h < hidden; ++h) d[h] += w * s[h];
  }
  for (size_t r = 0; r < degree.size(); ++r) {
    if (degree[r] == 0) continue;
    const double inv = 1.0 / degree[r];
    double* d = dst.data() + r * hidden;
    for (int h = 0; h < hidden; ++h) d[h] *= inv;
  }
}

// Transpose of Aggregate: dsrc[from] += w / deg[to] * ddst[to].
void AggregateBackward(const std::vector<int>& to, const std::vector<int>& from,
                       const std::vector<double>& weight,
                       const std::vector<int>& degree, const Mat& ddst,
                       int hidden, Mat& dsrc) {
  for (size_t k = 0; k < to.size(); ++k) {
    const double w = weight[k] / degree[to[k]];
    const double* s = ddst.data() + static_cast<size_t>(to[k]) * hidden;
    double* d = dsrc.data() + static_cast<size_t>(from[k]) * hidden;
    for (int h = 0; h < hidden; ++h) d[h] += w * s[h];
  }
}

}  // namespace

QLayout QLayout::For(int hidden) {
  QLayout l;
  l.hidden = hidden;
  int at = 0;
  auto take = [&at](int count) {
    const int start = at;
    at += count;
    return start;
  };
  l.var_w = take(hidden * kVarFeatures);
  l.var_b = take(hidden);
  l.cons_w = take(hidden * kConsFeatures);
  l.cons_b = take(hidden);
  l.c_self = take(hidden * hidden);
  l.c_nbr = take(hidden * hidden);
  l.c_b = take(hidden);
  l.v_self = take(hidden * hidden);
  l.v_nbr = take(hidden * hidden);
  l.v_b = take(hidden);
  l.out_w = take(hidden);
  l.out_b = take(1);
  l.total = at;
  return l;
}

QNetwork::QNetwork(int hidden)
    : layout_(QLayout::For(hidden)), params_(layout_.total, 0.0) {}

QOutput QNetwork::Forward(const Observation& obs, ForwardCache* cache) const {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  const int n = obs.n_vars();
  const int m = obs.n_cons();
  const int H = layout_.hidden;
  const double* p = params_.data();
  const GraphEdges& g = *obs.edges;

  auto affine = [&](const double* x, int rows, int in, int w_off, int b_off,
                    std::vector<double>& out) {
    out.resize(static_cast<size_t>(rows) * H);
    MapM o(out.data(), rows, H);
    o.noalias() = CMapM(x, rows, in) * CMapM(p + w_off, H, in).transpose();
    o.rowwise() += CMapV(p + b_off, H);
  };

  affine(obs.var_features.data(), n, kVarFeatures, layout_.var_w, layout_.var_b,
         c.var_pre);
  Relu(c.var_pre, c.var0);
  affine(obs.cons_features.data(), m, kConsFeatures, layout_.cons_w,
         layout_.cons_b, c.cons_pre);
  Relu(c.cons_pre, c.cons0);

  Aggregate(g.cons, g.var, g.weight, g.cons_degree, c.var0.data(), H,
            c.cons_agg);
  c.cons_pre1.resize(static_cast<size_t>(m) * H);
  {
    MapM o(c.cons_pre1.data(), m, H);
    o.noalias() = CMapM(c.cons0.data(), m, H) *
                  CMapM(p + layout_.c_self, H, H).transpose();
    o.noalias() += CMapM(c.cons_agg.data(), m, H) *
                   CMapM(p + layout_.c_nbr, H, H).transpose();
    o.rowwise() += CMapV(p + layout_.c_b, H);
  }
  Relu(c.cons_pre1, c.cons1);

  Aggregate(g.var, g.cons, g.weight, g.var_degree, c.cons1.data(), H,
            c.var_agg);
  c.var_pre1.resize(static_cast<size_t>(n) * H);
  {
    MapM o(c.var_pre1.data(), n, H);
    o.noalias() = CMapM(c.var0.data(), n, H) *
                  CMapM(p + layout_.v_self, H, H).transpose();
    o.noalias() += CMapM(c.var_agg.data(), n, H) *
                   CMapM(p + layout_.v_nbr, H, H).transpose();
    o.rowwise() += CMapV(p + layout_.v_b, H);
  }
  Relu(c.var_pre1, c.var1);

  QOutput out;
  out.logits.resize(n);
  Eigen::Map<Eigen::VectorXd>(out.logits.data(), n).noalias() =
      CMapM(c.var1.data(), n, H) *
      Eigen::Map<const Eigen::VectorXd>(p + layout_.out_w, H);
  out.q_values.resize(n);
  for (int j = 0; j < n; ++j) {
    out.logits[j] += p[layout_.out_b];
    out.q_values[j] = -std::exp(ClampLogit(out.logits[j]));
  }
  out.best = MaskedArgmin(out.logits, obs.action_mask);
  return out;
}

void QNetwork::Backward(const Observation& obs, const ForwardCache& c,
                        std::span<const double> upstream,
                        std::span<double> grad) const {
  const int n = obs.n_vars();
  const int m = obs.n_cons();
  const int H = layout_.hidden;
  const double* p = params_.data();
  double* gp = grad.data();
  const GraphEdges& g = *obs.edges;
  const Eigen::Map<const Eigen::VectorXd> up(upstream.data(), n);

  // Output head.
  Eigen::Map<Eigen::VectorXd>(gp + layout_.out_w, H).noalias() +=
      CMapM(c.var1.data(), n, H).transpose() * up;
  gp[layout_.out_b] += up.sum();

  // Variable update.
  Mat d_var1 = up * CMapV(p + layout_.out_w, H);
  ReluBackward(c.var_pre1, d_var1);
  MapM(gp + layout_.v_self, H, H).noalias() +=
      d_var1.transpose() * CMapM(c.var0.data(), n, H);
  MapM(gp + layout_.v_nbr, H, H).noalias() +=
      d_var1.transpose() * CMapM(c.var_agg.data(), n, H);
  MapV(gp + layout_.v_b, H) += d_var1.colwise().sum();
  Mat d_var0 = d_var1 * CMapM(p + layout_.v_self, H, H);
  const Mat d_var_agg = d_var1 * CMapM(p + layout_.v_nbr, H, H);
  Mat d_cons1 = Mat::Zero(m, H);
  AggregateBackward(g.var, g.cons, g.weight, g.var_degree, d_var_agg, H,
                    d_cons1);

  // Constraint update.
  ReluBackward(c.cons_pre1, d_cons1);
  MapM(gp + layout_.c_self, H, H).noalias() +=
      d_cons1.transpose() * CMapM(c.cons0.data(), m, H);
  MapM(gp + layout_.c_nbr, H, H).noalias() +=
      d_cons1.transpose() * CMapM(c.cons_agg.data(), m, H);
  MapV(gp + layout_.c_b, H) += d_cons1.colwise().sum();
  Mat d_cons0 = d_cons1 * CMapM(p + layout_.c_self, H, H);
  const Mat d_cons_agg = d_cons1 * CMapM(p + layout_.c_nbr, H, H);
  AggregateBackward(g.cons, g.var, g.weight, g.cons_degree, d_cons_agg, H,
                    d_var0);

  // Embeddings.
  ReluBackward(c.cons_pre, d_cons0);
  MapM(gp + layout_.cons_w, H, kConsFeatures).noalias() +=
      d_cons0.transpose() * CMapM(obs.cons_features.data(), m, kConsFeatures);
  MapV(gp + layout_.cons_b, H) += d_cons0.colwise().sum();
  ReluBackward(c.var_pre, d_var0);
  MapM(gp + layout_.var_w, H, kVarFeatures).noalias() +=
      d_var0.transpose() * CMapM(obs.var_features.data(), n, kVarFeatures);
  MapV(gp + layout_.var_b, H) += d_var0.colwise().sum();
}

QNetwork InitQNetwork(uint64_t seed, int hidden) {
  QNetwork net(hidden);
  const QLayout& l = net.layout();
  std::mt19937_64 rng(seed);
  auto fill = [&](int offset, int fan_out, int fan_in) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (int k = 0; k < fan_out * fan_in; ++k) net.params()[offset + k] = u(rng);
  };
  fill(l.var_w, hidden, kVarFeatures);
  fill(l.cons_w, hidden, kConsFeatures);
  fill(l.c_self, hidden, hidden);
  fill(l.c_nbr, hidden, hidden);
  fill(l.v_self, hidden, hidden);
  fill(l.v_nbr, hidden, hidden);
  fill(l.out_w, 1, hidden);
  return net;
}

int MaskedArgmin(std::span<const double> logits,
                 std::span<const uint8_t> mask) {
  int best = -1;
  for (int j = 0; j < static_cast<int>(logits.size()); ++j) {
    if (mask[j] && (best < 0 || logits[j] < logits[best])) best = j;
  }
  return best;
}

double ClampLogit(double logit) {
  return std::clamp(logit, -kLogitClamp, kLogitClamp);
}

int ActEpsilonGreedy(const QNetwork& net, const Observation& obs,
                     double epsilon, std::mt19937_64& rng) {
  const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (r < epsilon) {
    const std::vector<int> actions = obs.Actions();
    return actions[std::uniform_int_distribution<size_t>(0, actions.size() - 1)(
        rng)];
  }
  return net.Forward(obs).best;
}

std::string SerializeQNetwork(const QNetwork& net) {
  std::string out = absl::StrCat(kHeader, "\n");
  absl::StrAppend(&out, "dims ", net.hidden(), " ", kVarFeatures, " ",
                  kConsFeatures, " ", net.num_params(), "\n");
  for (double v : net.params()) absl::StrAppend(&out, FormatDouble(v), "\n");
  return out;
}

absl::StatusOr<QNetwork> ParseQNetwork(absl::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.empty() || lines[0] != kHeader) {
    if (!lines.empty() && lines[0].substr(0, 6) == "QNET v") {
      return absl::UnimplementedError(
          absl::StrCat("unsupported checkpoint version '", lines[0], "'"));
    }
    return absl::InvalidArgumentError("missing 'QNET v1' header");
  }
  if (lines.size() < 2) return absl::InvalidArgumentError("missing dims line");
  std::vector<absl::string_view> dims =
      absl::StrSplit(lines[1], ' ', absl::SkipEmpty());
  int hidden = 0, fv = 0, fc = 0, count = 0;
  if (dims.size() != 5 || dims[0] != "dims" ||
      !absl::SimpleAtoi(dims[1], &hidden) || !absl::SimpleAtoi(dims[2], &fv) ||
      !absl::SimpleAtoi(dims[3], &fc) || !absl::SimpleAtoi(dims[4], &count) ||
      hidden <= 0) {
    return absl::InvalidArgumentError("malformed dims line");
  }
  if (fv != kVarFeatures || fc != kConsFeatures) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature sizes ", fv, "/", fc, " do not match ", kVarFeatures, "/",
        kConsFeatures));
  }
  QNetwork net(hidden);
  if (count != net.num_params() ||
      static_cast<int>(lines.size()) != count + 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", net.num_params(), " parameters, found ", lines.size() - 2));
  }
  for (int k = 0; k < count; ++k) {
    ASSIGN_OR_RETURN(const double v, ParseDouble(lines[k + 2]));
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite parameter ", k));
    }
    net.params()[k] = v;
  }
  return net;
}

absl::Status SaveQNetwork(const QNetwork& net, const std::string& path) {
  return WriteFile(path, SerializeQNetwork(net));
}

absl::StatusOr<QNetwork> LoadQNetwork(const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  auto net = ParseQNetwork(text);
  if (!net.ok()) {
    return absl::Status(net.status().code(),
                        absl::StrCat(path, ": ", net.status().message()));
  }
  return net;
}

}  // namespace branchrl
