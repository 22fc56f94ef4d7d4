// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "connectikit/error.hpp"
#include "connectikit/numerics.hpp"

namespace connectikit {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr std::size_t kMaxPivots = 200000;

// x_j = offset + sum of coef * y_k over at most two nonnegative standard-form variables.
struct VarMap {
  double offset = 0.0;
  std::size_t k[2] = {0, 0};
  double coef[2] = {0.0, 0.0};
  int terms = 0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c, Vec& obj) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = obj[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= n_; ++j) obj[j] -= f * at(r, j);
      obj[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Bland's rule on the reduced-cost row `obj` (last entry holds -objective value).
  // Returns false if the objective is unbounded below.
  bool optimize(Vec& obj, const std::vector<bool>& allowed, std::size_t& pivots) {
    for (;;) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (allowed[j] && obj[j] < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double aij = at(i, enter);
        if (aij <= kPivotTol) continue;
        const double ratio = rhs(i) / aij;
        if (leave == m_ || ratio < best - 1e-14 ||
            (ratio <= best + 1e-14 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter, obj);
      if (++pivots > kMaxPivots) throw NumericError("simplex: pivot limit exceeded");
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

void check_block(const Mat& block, std::size_t nvars, const char* name) {
  if (block.rows() > 0 && block.cols() != nvars) {
    throw UsageError(std::string("lp: ") + name + " has " + std::to_string(block.cols()) +
                     " columns, expected " + std::to_string(nvars));
  }
}

LpSolution solve(std::span<const double> objective, const Mat& eq_lhs, std::span<const double> eq_rhs,
                 std::span<const Interval> bounds, const Mat& strict_rows, double strict_eps,
                 const Mat& ge_rows, bool phase_two) {
  const std::size_t nx = bounds.size();
  check_block(eq_lhs, nx, "equality block");
  check_block(strict_rows, nx, "strict block");
  check_block(ge_rows, nx, "ge block");
  if (eq_lhs.rows() != eq_rhs.size()) throw UsageError("lp: equality rhs length mismatch");
  if (!objective.empty() && objective.size() != nx) throw UsageError("lp: objective length mismatch");
  if (!(strict_eps > 0.0) && strict_rows.rows() > 0) throw UsageError("lp: strict_eps must be positive");

  LpSolution out;
  // Map bounded variables onto nonnegative standard-form variables.
  std::vector<VarMap> map(nx);
  std::vector<std::pair<std::size_t, double>> upper;  // (y index, upper bound on y)
  std::size_t ny = 0;
  for (std::size_t j = 0; j < nx; ++j) {
    const Interval b = bounds[j];
    if (std::isnan(b.lo) || std::isnan(b.hi)) throw UsageError("lp: NaN bound");
    if (b.lo > b.hi) return out;
    VarMap& vm = map[j];
    if (std::isfinite(b.lo) && b.lo == b.hi) {
      vm.offset = b.lo;
    } else if (std::isfinite(b.lo)) {
      vm.offset = b.lo;
      vm.k[0] = ny;
      vm.coef[0] = 1.0;
      vm.terms = 1;
      if (std::isfinite(b.hi)) upper.emplace_back(ny, b.hi - b.lo);
      ++ny;
    } else if (std::isfinite(b.hi)) {
      vm.offset = b.hi;
      vm.k[0] = ny++;
      vm.coef[0] = -1.0;
      vm.terms = 1;
    } else {
      vm.k[0] = ny++;
      vm.coef[0] = 1.0;
      vm.k[1] = ny++;
      vm.coef[1] = -1.0;
      vm.terms = 2;
    }
  }

  const std::size_t n_eq = eq_lhs.rows();
  const std::size_t n_ineq = strict_rows.rows() + ge_rows.rows();
  const std::size_t n_rows = n_eq + n_ineq + upper.size();
  const std::size_t n_slack = n_ineq + upper.size();
  const std::size_t n_struct = ny + n_slack;
  const std::size_t n_cols = n_struct + n_rows;  // artificials last

  Tableau tab(n_rows, n_cols);
  auto load_row = [&](std::size_t r, std::span<const double> coeffs, double rhs) {
    double shifted = rhs;
    for (std::size_t j = 0; j < nx; ++j) {
      const double c = coeffs[j];
      if (c == 0.0) continue;
      shifted -= c * map[j].offset;
      for (int t = 0; t < map[j].terms; ++t) tab.at(r, map[j].k[t]) += c * map[j].coef[t];
    }
    tab.rhs(r) = shifted;
  };

  std::size_t r = 0;
  for (std::size_t i = 0; i < n_eq; ++i, ++r) load_row(r, eq_lhs.row(i), eq_rhs[i]);
  std::size_t slack = ny;
  for (std::size_t i = 0; i < strict_rows.rows(); ++i, ++r) {
    load_row(r, strict_rows.row(i), strict_eps);
    tab.at(r, slack++) = -1.0;
  }
  for (std::size_t i = 0; i < ge_rows.rows(); ++i, ++r) {
    load_row(r, ge_rows.row(i), 0.0);
    tab.at(r, slack++) = -1.0;
  }
  for (const auto& [k, ub] : upper) {
    tab.at(r, k) = 1.0;
    tab.at(r, slack++) = 1.0;
    tab.rhs(r) = ub;
    ++r;
  }

  double rhs_scale = 1.0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (tab.rhs(i) < 0.0) {
      for (std::size_t j = 0; j <= n_struct; ++j) {
        if (j < n_struct) tab.at(i, j) = -tab.at(i, j);
      }
      tab.rhs(i) = -tab.rhs(i);
    }
    rhs_scale = std::max(rhs_scale, tab.rhs(i));
    tab.at(i, n_struct + i) = 1.0;
    tab.basis()[i] = n_struct + i;
  }

  // Phase 1: minimize the sum of artificials.
  Vec obj(n_cols + 1, 0.0);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t j = 0; j < n_struct; ++j) obj[j] -= tab.at(i, j);
    obj[n_cols] -= tab.rhs(i);
  }
  std::vector<bool> allowed(n_cols, true);
  std::size_t pivots = 0;
  tab.optimize(obj, allowed, pivots);
  const double infeasibility = -obj[n_cols];
  if (infeasibility > 1e-9 * rhs_scale) return out;

  // Drive zero-level artificials out of the basis where possible.
  Vec dummy(n_cols + 1, 0.0);
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (tab.basis()[i] < n_struct) continue;
    for (std::size_t j = 0; j < n_struct; ++j) {
      if (std::abs(tab.at(i, j)) > kPivotTol) {
        tab.pivot(i, j, dummy);
        break;
      }
    }
  }
  for (std::size_t j = n_struct; j < n_cols; ++j) allowed[j] = false;

  out.status = LpStatus::Optimal;
  if (phase_two && !objective.empty()) {
    Vec cost(n_cols + 1, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
      for (int t = 0; t < map[j].terms; ++t) cost[map[j].k[t]] += objective[j] * map[j].coef[t];
    }
    // Express the cost in terms of nonbasic variables.
    for (std::size_t i = 0; i < n_rows; ++i) {
      const std::size_t b = tab.basis()[i];
      const double cb = cost[b];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_cols; ++j) cost[j] -= cb * tab.at(i, j);
      cost[b] = 0.0;
    }
    if (!tab.optimize(cost, allowed, pivots)) {
      out.status = LpStatus::Unbounded;
    }
  }

  Vec y(n_cols, 0.0);
  for (std::size_t i = 0; i < n_rows; ++i) y[tab.basis()[i]] = std::max(0.0, tab.rhs(i));
  out.x.assign(nx, 0.0);
  for (std::size_t j = 0; j < nx; ++j) {
    double v = map[j].offset;
    for (int t = 0; t < map[j].terms; ++t) v += map[j].coef[t] * y[map[j].k[t]];
    out.x[j] = std::clamp(v, bounds[j].lo, bounds[j].hi);
  }
  if (!objective.empty()) out.value = dot(objective, out.x);
  return out;
}

}  // namespace

LpResult lp_feasible(const Mat& eq_lhs, std::span<const double> eq_rhs, std::span<const Interval> bounds,
                     const Mat& strict_rows, double strict_eps, const Mat& ge_rows) {
  const LpSolution s = solve({}, eq_lhs, eq_rhs, bounds, strict_rows, strict_eps, ge_rows, false);
  LpResult r;
  r.feasible = s.status != LpStatus::Infeasible;
  if (r.feasible) r.witness = s.x;
  return r;
}

LpSolution lp_minimize(std::span<const double> objective, const Mat& eq_lhs, std::span<const double> eq_rhs,
                       std::span<const Interval> bounds, const Mat& strict_rows, double strict_eps,
                       const Mat& ge_rows) {
  if (objective.size() != bounds.size()) throw UsageError("lp: objective length mismatch");
  return solve(objective, eq_lhs, eq_rhs, bounds, strict_rows, strict_eps, ge_rows, true);
}

}  // namespace connectikit
