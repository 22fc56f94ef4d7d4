// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace connectikit {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat diag(std::span<const double> d);
  static Mat column(std::span<const double> v);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<double> data() { return data_; }
  [[nodiscard]] std::span<const double> data() const { return data_; }
  [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  [[nodiscard]] Vec col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);

  [[nodiscard]] Mat transpose() const;
  [[nodiscard]] bool all_finite() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);
Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, std::span<const double> x);
/// Trace inner product sum_ij a_ij b_ij.
double frobenius_inner(const Mat& a, const Mat& b);
double max_abs_diff(const Mat& a, const Mat& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
double norm1(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

struct SvdResult {
  Mat u;       ///< rows x k, orthonormal columns
  Vec sigma;   ///< k values, nonincreasing
  Mat vt;      ///< k x cols, orthonormal rows
};

/// Thin SVD (k = min(rows, cols)) by one-sided Jacobi with a fixed cyclic sweep order.
/// Throws NumericError if 60 sweeps do not converge.
SvdResult svd(const Mat& a);

enum class NormKind { MaxEntry, L1Entry, Frobenius, Operator, Nuclear };

NormKind dual(NormKind kind);
double matrix_norm(const Mat& a, NormKind kind);
/// Norm applied to the second-layer vector alongside a matrix norm: l-infinity for MaxEntry,
/// l1 for L1Entry, l2 for the unitarily invariant kinds.
double vector_norm(std::span<const double> v, NormKind kind);
std::string_view to_string(NormKind kind);
/// Accepts case-insensitive names such as "max", "maxentry", "frobenius", "fro", "op", "operator".
NormKind parse_norm_kind(std::string_view name);

/// Inverse by Gauss-Jordan elimination with partial pivoting; throws NumericError when the
/// smallest singular value is below 1e-12 times the largest.
Mat invert(const Mat& a);

struct Assignment {
  std::vector<std::size_t> perm;  ///< perm[row] = assigned column
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method, O(n^3)).
/// Columns are scanned in increasing index order and only strict improvements replace the
/// incumbent, so ties resolve toward lower indices.
Assignment solve_assignment(const Mat& cost);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct LpResult {
  bool feasible = false;
  Vec witness;
};

/// Feasibility of
///   eq_lhs x = eq_rhs,  lo_j <= x_j <= hi_j,  strict_rows x >= strict_eps,  ge_rows x >= 0
/// by a two-phase dense simplex with Bland's rule. Empty matrices (0 rows) mean "no rows of
/// that type" but must still have the right number of columns if non-empty.
LpResult lp_feasible(const Mat& eq_lhs, std::span<const double> eq_rhs,
                     std::span<const Interval> bounds, const Mat& strict_rows, double strict_eps,
                     const Mat& ge_rows = Mat());

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double value = 0.0;
};

/// Minimizes objective . x over the same constraint system as lp_feasible (phase 2 of the
/// two-phase method; lp_feasible stops after phase 1).
LpSolution lp_minimize(std::span<const double> objective, const Mat& eq_lhs,
                       std::span<const double> eq_rhs, std::span<const Interval> bounds,
                       const Mat& strict_rows, double strict_eps, const Mat& ge_rows = Mat());

}  // namespace connectikit
