// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "connectikit/error.hpp"

namespace connectikit {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw UsageError("Mat: entry count " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw UsageError("Mat: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::column(std::span<const double> v) {
  return Mat(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Vec Mat::col(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void Mat::set_col(std::size_t c, std::span<const double> v) {
  if (v.size() != rows_) throw UsageError("Mat::set_col: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Mat& Mat::operator+=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw UsageError("Mat +=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw UsageError("Mat -=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw UsageError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                     std::to_string(b.rows()) + " differ");
  }
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Vec matvec(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw UsageError("matvec: dimension mismatch");
  Vec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double frobenius_inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw UsageError("frobenius_inner: shape mismatch");
  }
  return dot(a.data(), b.data());
}

double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("max_abs_diff: shape mismatch");
  return max_abs_diff(a.data(), b.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation avoids overflow and underflow for extreme entries.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double x : v) {
    const double r = x / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace {

constexpr int kMaxSweeps = 60;

// Orthonormalizes a unit vector against `basis` (two Gram-Schmidt passes) choosing the first
// coordinate axis that leaves a substantial residual.
Vec complete_basis(const std::vector<Vec>& basis, std::size_t dim) {
  for (std::size_t axis = 0; axis < dim; ++axis) {
    Vec e(dim, 0.0);
    e[axis] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis) {
        const double c = dot(b, e);
        for (std::size_t k = 0; k < dim; ++k) e[k] -= c * b[k];
      }
    }
    const double n = norm2(e);
    if (n > 0.5) {
      for (double& x : e) x /= n;
      return e;
    }
  }
  throw NumericError("svd: could not complete orthonormal basis");
}

// One-sided Jacobi on the columns of a tall (rows >= cols) matrix.
SvdResult svd_tall(const Mat& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<Vec> cols(n, Vec(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cols[j][i] = a(i, j);
  std::vector<Vec> v(n, Vec(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(m, 2));
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        Vec& cp = cols[p];
        Vec& cq = cols[q];
        const double alpha = dot(cp, cp);
        const double beta = dot(cq, cq);
        const double gamma = dot(cp, cq);
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        if (t == 0.0) continue;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotated = true;
        for (std::size_t k = 0; k < m; ++k) {
          const double xp = cp[k];
          const double xq = cq[k];
          cp[k] = c * xp - s * xq;
          cq[k] = s * xp + c * xq;
        }
        Vec& vp = v[p];
        Vec& vq = v[q];
        for (std::size_t k = 0; k < n; ++k) {
          const double xp = vp[k];
          const double xq = vq[k];
          vp[k] = c * xp - s * xq;
          vq[k] = s * xp + c * xq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw NumericError("svd: one-sided Jacobi did not converge in 60 sweeps");

  Vec norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(cols[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdResult out{Mat(m, n), Vec(n), Mat(n, n)};
  std::vector<Vec> basis;
  basis.reserve(n);
  const double tiny = std::numeric_limits<double>::min() * 1e8;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = norms[j];
    Vec u(m);
    if (norms[j] > tiny) {
      for (std::size_t i = 0; i < m; ++i) u[i] = cols[j][i] / norms[j];
    } else {
      u = complete_basis(basis, m);
    }
    out.u.set_col(k, u);
    basis.push_back(std::move(u));
    for (std::size_t i = 0; i < n; ++i) out.vt(k, i) = v[j][i];
  }
  return out;
}

}  // namespace

SvdResult svd(const Mat& a) {
  if (!a.all_finite()) throw NumericError("svd: input has non-finite entries");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdResult t = svd_tall(a.transpose());
  return SvdResult{t.vt.transpose(), std::move(t.sigma), t.u.transpose()};
}

NormKind dual(NormKind kind) {
  switch (kind) {
    case NormKind::MaxEntry: return NormKind::L1Entry;
    case NormKind::L1Entry: return NormKind::MaxEntry;
    case NormKind::Frobenius: return NormKind::Frobenius;
    case NormKind::Operator: return NormKind::Nuclear;
    case NormKind::Nuclear: return NormKind::Operator;
  }
  return kind;
}

double matrix_norm(const Mat& a, NormKind kind) {
  switch (kind) {
    case NormKind::MaxEntry: return norm_inf(a.data());
    case NormKind::L1Entry: return norm1(a.data());
    case NormKind::Frobenius: return norm2(a.data());
    case NormKind::Operator: {
      if (a.empty()) return 0.0;
      return svd(a).sigma.front();
    }
    case NormKind::Nuclear: {
      if (a.empty()) return 0.0;
      const Vec s = svd(a).sigma;
      return std::accumulate(s.begin(), s.end(), 0.0);
    }
  }
  return 0.0;
}

double vector_norm(std::span<const double> v, NormKind kind) {
  switch (kind) {
    case NormKind::MaxEntry: return norm_inf(v);
    case NormKind::L1Entry: return norm1(v);
    default: return norm2(v);
  }
}

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::MaxEntry: return "maxentry";
    case NormKind::L1Entry: return "l1entry";
    case NormKind::Frobenius: return "frobenius";
    case NormKind::Operator: return "operator";
    case NormKind::Nuclear: return "nuclear";
  }
  return "?";
}

NormKind parse_norm_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "max" || s == "maxentry" || s == "inf" || s == "linf") return NormKind::MaxEntry;
  if (s == "l1" || s == "l1entry") return NormKind::L1Entry;
  if (s == "fro" || s == "frobenius" || s == "l2") return NormKind::Frobenius;
  if (s == "op" || s == "operator" || s == "spectral") return NormKind::Operator;
  if (s == "nuc" || s == "nuclear") return NormKind::Nuclear;
  throw UsageError("unknown norm kind '" + s + "'");
}

Mat invert(const Mat& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw UsageError("invert: matrix is not square");
  if (n == 0) return Mat();
  const SvdResult s = svd(a);
  if (s.sigma.front() == 0.0 || s.sigma.back() < 1e-12 * s.sigma.front()) {
    throw NumericError("invert: matrix is singular to working precision");
  }
  Mat w = a;
  Mat inv = Mat::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(w(piv, c), w(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    }
    const double p = w(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      w(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = w(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        w(r, c) -= f * w(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

Assignment solve_assignment(const Mat& cost) {
  const std::size_t n = cost.rows();
  if (cost.cols() != n) throw UsageError("solve_assignment: cost matrix is not square");
  if (!cost.all_finite()) throw UsageError("solve_assignment: non-finite cost");
  Assignment out;
  if (n == 0) return out;

  // Potentials-based shortest augmenting path, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  Vec u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    Vec minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.cost += cost(i, out.perm[i]);
  return out;
}

}  // namespace connectikit
