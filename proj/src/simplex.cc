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

#include "branchrl/simplex.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "branchrl/status_macros.h"

namespace branchrl {

double BoundOverride::Lower(const MilpInstance& instance, int var) const {
  auto it = bounds_.find(var);
  return it == bounds_.end() ? instance.lower[var] : it->second.first;
}

double BoundOverride::Upper(const MilpInstance& instance, int var) const {
  auto it = bounds_.find(var);
  return it == bounds_.end() ? instance.upper[var] : it->second.second;
}

double Fractionality(double value) {
  const double f = value - std::floor(value);
  return std::min(f, 1.0 - f);
}

std::vector<int> FractionalVariables(const MilpInstance& instance,
                                     const LpResult& lp) {
  std::vector<int> result;
  if (!lp.optimal()) return result;
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer[j] && Fractionality(lp.primal[j]) > kIntegralityTol) {
      result.push_back(j);
    }
  }
  return result;
}

namespace {

// Columns are laid out as [structural (n) | slack (m) | artificial (k)].
// Row i of the tableau holds B^-1 times the constraint row "a_i x + s_i = b_i"
// (with the artificial, if any, entering that row with coefficient -1).
class Tableau {
 public:
  Tableau(const MilpInstance& instance, const BoundOverride& over,
          const LpOptions& options)
      : instance_(instance),
        options_(options),
        n_(instance.num_vars()),
        m_(instance.num_cons()) {
    Build(over);
  }

  absl::StatusOr<LpResult> Solve() {
    LpResult result;
    if (crossed_) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    if (num_art_ > 0) {
      std::fill(cost_.begin(), cost_.end(), 0.0);
      for (int c = n_ + m_; c < cols_; ++c) cost_[c] = 1.0;
      RETURN_IF_ERROR(Optimize());
      double infeasibility = 0.0;
      for (int c = n_ + m_; c < cols_; ++c) infeasibility += x_[c];
      if (infeasibility > options_.feas_tol) {
        result.status = LpStatus::kInfeasible;
        result.iterations = iterations_;
        return result;
      }
      // Artificials are pinned at zero from here on.
      for (int c = n_ + m_; c < cols_; ++c) hi_[c] = 0.0;
    }
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(instance_.objective.begin(), instance_.objective.end(),
              cost_.begin());
    RETURN_IF_ERROR(Optimize());
    return Extract();
  }

 private:
  double& T(int row, int col) { return tab_[static_cast<size_t>(row) * cols_ + col]; }
  double T(int row, int col) const {
    return tab_[static_cast<size_t>(row) * cols_ + col];
  }

  void Build(const BoundOverride& over) {
    std::vector<double> lo(n_), hi(n_);
    for (int j = 0; j < n_; ++j) {
      lo[j] = over.Lower(instance_, j);
      hi[j] = over.Upper(instance_, j);
      if (lo[j] > hi[j]) crossed_ = true;
    }
    if (crossed_) return;

    std::vector<double> start(n_);
    for (int j = 0; j < n_; ++j) {
      start[j] = std::isfinite(lo[j]) ? lo[j] : (std::isfinite(hi[j]) ? hi[j] : 0.0);
    }
    std::vector<double> residual(m_);
    for (int i = 0; i < m_; ++i) {
      const SparseRow& row = instance_.rows[i];
      double activity = 0.0;
      for (int k = 0; k < row.size(); ++k) {
        activity += row.coef[k] * start[row.index[k]];
      }
      residual[i] = row.rhs - activity;
      if (residual[i] < 0.0) ++num_art_;
    }

    cols_ = n_ + m_ + num_art_;
    tab_.assign(static_cast<size_t>(m_) * cols_, 0.0);
    lo_.assign(cols_, 0.0);
    hi_.assign(cols_, kInf);
    x_.assign(cols_, 0.0);
    cost_.assign(cols_, 0.0);
    d_.assign(cols_, 0.0);
    basis_.assign(m_, -1);
    is_basic_.assign(cols_, false);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lo[j];
      hi_[j] = hi[j];
      x_[j] = start[j];
    }

    int art = n_ + m_;
    for (int i = 0; i < m_; ++i) {
      const SparseRow& row = instance_.rows[i];
      const bool needs_art = residual[i] < 0.0;
      const double sign = needs_art ? -1.0 : 1.0;
      for (int k = 0; k < row.size(); ++k) T(i, row.index[k]) = sign * row.coef[k];
      T(i, n_ + i) = sign;
      if (needs_art) {
        T(i, art) = 1.0;
        basis_[i] = art;
        x_[art] = -residual[i];
        ++art;
      } else {
        basis_[i] = n_ + i;
        x_[n_ + i] = residual[i];
      }
      is_basic_[basis_[i]] = true;
    }
  }

  void ComputeReducedCosts() {
    d_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[static_cast<size_t>(i) * cols_];
      for (int c = 0; c < cols_; ++c) d_[c] -= cb * row[c];
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  // Direction in which nonbasic column c improves the objective, or 0.
  int ImprovingDirection(int c) const {
    if (is_basic_[c] || lo_[c] == hi_[c]) return 0;
    const double dc = d_[c];
    const bool at_lower = std::isfinite(lo_[c]) && x_[c] == lo_[c];
    const bool at_upper = std::isfinite(hi_[c]) && x_[c] == hi_[c];
    if (dc < -options_.opt_tol && !at_upper) return +1;
    if (dc > options_.opt_tol && !at_lower) return -1;
    return 0;
  }

  absl::Status Optimize() {
    ComputeReducedCosts();
    bool bland = false;
    int degenerate = 0;
    const int max_iterations = options_.max_iterations > 0
                                   ? options_.max_iterations
                                   : 50 * (n_ + m_) + 5000;
    std::vector<int> nonzero;
    nonzero.reserve(cols_);
    while (true) {
      if (iterations_ >= max_iterations) {
        return absl::InternalError(absl::StrCat(
            "simplex iteration limit ", max_iterations, " exceeded on ",
            instance_.name));
      }

      int enter = -1;
      int dir = 0;
      double best = 0.0;
      for (int c = 0; c < cols_; ++c) {
        const int cdir = ImprovingDirection(c);
        if (cdir == 0) continue;
        if (bland) {
          enter = c;
          dir = cdir;
          break;
        }
        if (std::abs(d_[c]) > best) {
          best = std::abs(d_[c]);
          enter = c;
          dir = cdir;
        }
      }
      if (enter < 0) return absl::OkStatus();

      // Ratio test. The entering variable's own range bounds the step.
      double theta = hi_[enter] - lo_[enter];
      int leave = -1;
      double leave_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, enter);
        if (std::abs(alpha) <= options_.pivot_tol) continue;
        const int b = basis_[i];
        double t;
        if (alpha > 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          t = (x_[b] - lo_[b]) / alpha;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          t = (hi_[b] - x_[b]) / -alpha;
        }
        t = std::max(t, 0.0);
        bool take = false;
        if (t < theta - 1e-12) {
          take = true;
        } else if (leave >= 0 && t <= theta + 1e-12) {
          take = bland ? b < basis_[leave]
                       : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          theta = t;
          leave = i;
          leave_alpha = alpha;
        }
      }
      if (!std::isfinite(theta)) {
        return absl::InternalError(
            absl::StrCat("LP relaxation of ", instance_.name, " is unbounded"));
      }

      ++iterations_;
      if (theta <= 1e-12) {
        if (++degenerate >= options_.degenerate_pivots_before_bland) bland = true;
      }

      x_[enter] += dir * theta;
      if (theta != 0.0) {
        for (int i = 0; i < m_; ++i) {
          const double a = T(i, enter);
          if (a != 0.0) x_[basis_[i]] -= a * dir * theta;
        }
      }
      if (leave < 0) {
        // Bound flip: the entering variable crosses to its other bound.
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }

      const int out = basis_[leave];
      x_[out] = leave_alpha > 0.0 ? lo_[out] : hi_[out];
      Pivot(leave, enter, nonzero);
      is_basic_[out] = false;
      is_basic_[enter] = true;
      basis_[leave] = enter;
    }
  }

  void Pivot(int r, int q, std::vector<int>& nonzero) {
    double* prow = &tab_[static_cast<size_t>(r) * cols_];
    const double inv = 1.0 / prow[q];
    nonzero.clear();
    for (int c = 0; c < cols_; ++c) {
      if (prow[c] != 0.0) {
        prow[c] *= inv;
        nonzero.push_back(c);
      }
    }
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[static_cast<size_t>(i) * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (int c : nonzero) {
        double v = row[c] - f * prow[c];
        row[c] = std::abs(v) < 1e-14 ? 0.0 : v;
      }
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (int c : nonzero) d_[c] -= f * prow[c];
      d_[q] = 0.0;
    }
  }

  LpResult Extract() {
    LpResult result;
    result.status = LpStatus::kOptimal;
    result.iterations = iterations_;

    // Recompute basic values from B^-1 (the slack block of the tableau) to
    // shed drift accumulated by the incremental updates.
    for (int i = 0; i < m_; ++i) {
      double value = 0.0;
      for (int k = 0; k < m_; ++k) {
        const double binv = T(i, n_ + k);
        if (binv != 0.0) value += binv * instance_.rows[k].rhs;
      }
      for (int c = 0; c < cols_; ++c) {
        if (!is_basic_[c] && x_[c] != 0.0) value -= T(i, c) * x_[c];
      }
      x_[basis_[i]] = value;
    }

    result.primal.assign(x_.begin(), x_.begin() + n_);
    result.objective = 0.0;
    for (int j = 0; j < n_; ++j) {
      result.objective += instance_.objective[j] * result.primal[j];
    }
    result.duals.resize(m_);
    for (int i = 0; i < m_; ++i) result.duals[i] = -d_[n_ + i];

    result.reduced_costs = instance_.objective;
    for (int i = 0; i < m_; ++i) {
      const SparseRow& row = instance_.rows[i];
      const double y = result.duals[i];
      if (y == 0.0) continue;
      for (int k = 0; k < row.size(); ++k) {
        result.reduced_costs[row.index[k]] -= y * row.coef[k];
      }
    }
    result.basic.assign(is_basic_.begin(), is_basic_.begin() + n_);

    double dual = 0.0;
    for (int i = 0; i < m_; ++i) dual += result.duals[i] * instance_.rows[i].rhs;
    for (int j = 0; j < n_; ++j) {
      const double rc = result.reduced_costs[j];
      if (std::abs(rc) <= options_.opt_tol) {
        dual += rc * result.primal[j];
      } else {
        dual += rc * (rc > 0.0 ? lo_[j] : hi_[j]);
      }
    }
    result.dual_objective = dual;
    return result;
  }

  const MilpInstance& instance_;
  const LpOptions& options_;
  const int n_;
  const int m_;
  int num_art_ = 0;
  int cols_ = 0;
  bool crossed_ = false;
  int iterations_ = 0;

  std::vector<double> tab_;
  std::vector<double> lo_, hi_, x_, cost_, d_;
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
};

}  // namespace

absl::StatusOr<LpResult> SolveLp(const MilpInstance& instance,
                                 const BoundOverride& over,
                                 const LpOptions& options) {
  Tableau tableau(instance, over, options);
  return tableau.Solve();
}

absl::StatusOr<ProbeBounds> StrongBranchProbe(const MilpInstance& instance,
                                              const BoundOverride& over,
                                              int var, double floor_val,
                                              double ceil_val) {
  if (var < 0 || var >= instance.num_vars() || !(floor_val < ceil_val)) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad strong branching probe on var ", var));
  }
  const double lower = over.Lower(instance, var);
  const double upper = over.Upper(instance, var);
  ProbeBounds bounds;

  BoundOverride down = over;
  down.Set(var, lower, floor_val);
  ASSIGN_OR_RETURN(const LpResult down_lp, SolveLp(instance, down));
  if (down_lp.optimal()) bounds.down = down_lp.objective;

  BoundOverride up = over;
  up.Set(var, ceil_val, upper);
  ASSIGN_OR_RETURN(const LpResult up_lp, SolveLp(instance, up));
  if (up_lp.optimal()) bounds.up = up_lp.objective;
  return bounds;
}

}  // namespace branchrl
