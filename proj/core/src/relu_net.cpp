// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/relu_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "connectikit/error.hpp"
#include "connectikit/rng.hpp"

namespace connectikit {

TwoLayerNet::TwoLayerNet(Mat w_, Vec alpha_) : w(std::move(w_)), alpha(std::move(alpha_)) { validate(); }

TwoLayerNet TwoLayerNet::zeros(std::size_t d, std::size_t m) { return TwoLayerNet(Mat(d, m), Vec(m, 0.0)); }

bool TwoLayerNet::neuron_is_zero(std::size_t i) const {
  if (alpha[i] != 0.0) return false;
  for (std::size_t r = 0; r < w.rows(); ++r)
    if (w(r, i) != 0.0) return false;
  return true;
}

bool TwoLayerNet::same_shape(const TwoLayerNet& o) const {
  return w.rows() == o.w.rows() && w.cols() == o.w.cols() && alpha.size() == o.alpha.size();
}

void TwoLayerNet::validate() const {
  if (w.cols() != alpha.size()) {
    throw UsageError("TwoLayerNet: W has " + std::to_string(w.cols()) + " columns but alpha has " +
                     std::to_string(alpha.size()) + " entries");
  }
  if (!w.all_finite() || !std::all_of(alpha.begin(), alpha.end(), [](double v) { return std::isfinite(v); })) {
    throw NumericError("TwoLayerNet: non-finite parameter");
  }
}

TwoLayerNet lerp(const TwoLayerNet& a, const TwoLayerNet& b, double t) {
  if (!a.same_shape(b)) throw UsageError("lerp: shape mismatch");
  // Entries shared by both endpoints stay bitwise fixed.
  auto mix = [t](double x, double y) { return x == y ? x : (1.0 - t) * x + t * y; };
  TwoLayerNet out = a;
  auto ow = out.w.data();
  auto bw = b.w.data();
  for (std::size_t k = 0; k < ow.size(); ++k) ow[k] = mix(ow[k], bw[k]);
  for (std::size_t k = 0; k < out.alpha.size(); ++k) out.alpha[k] = mix(out.alpha[k], b.alpha[k]);
  return out;
}

double max_abs_diff(const TwoLayerNet& a, const TwoLayerNet& b) {
  if (!a.same_shape(b)) throw UsageError("max_abs_diff: shape mismatch");
  return std::max(max_abs_diff(a.w, b.w), max_abs_diff(a.alpha, b.alpha));
}

TwoLayerNet permute_neurons(const TwoLayerNet& net, std::span<const std::size_t> perm) {
  const std::size_t m = net.width();
  if (perm.size() != m) throw UsageError("permute_neurons: permutation length mismatch");
  std::vector<bool> seen(m, false);
  TwoLayerNet out = net;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t src = perm[i];
    if (src >= m || seen[src]) throw UsageError("permute_neurons: not a permutation");
    seen[src] = true;
    out.alpha[i] = net.alpha[src];
    for (std::size_t r = 0; r < net.w.rows(); ++r) out.w(r, i) = net.w(r, src);
  }
  return out;
}

Vec flatten(const TwoLayerNet& net) {
  Vec theta(net.w.data().begin(), net.w.data().end());
  theta.insert(theta.end(), net.alpha.begin(), net.alpha.end());
  return theta;
}

TwoLayerNet unflatten(std::span<const double> theta, std::size_t d, std::size_t m) {
  if (theta.size() != d * m + m) throw UsageError("unflatten: length mismatch");
  Mat w(d, m, std::vector<double>(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d * m)));
  Vec alpha(theta.begin() + static_cast<std::ptrdiff_t>(d * m), theta.end());
  return TwoLayerNet(std::move(w), std::move(alpha));
}

void Dataset::validate() const {
  if (x.rows() != y.size()) {
    throw UsageError("Dataset: X has " + std::to_string(x.rows()) + " rows but y has " +
                     std::to_string(y.size()) + " entries");
  }
}

void RegSetSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("RegSetSpec: lambda must be positive");
  if (norm != NormKind::MaxEntry && norm != NormKind::Frobenius && norm != NormKind::Operator) {
    throw UsageError("RegSetSpec: constraint norm must be maxentry, frobenius or operator");
  }
}

Vec forward(const TwoLayerNet& net, const Mat& x) {
  if (x.cols() != net.w.rows()) {
    throw UsageError("forward: data dimension " + std::to_string(x.cols()) + " != net input dimension " +
                     std::to_string(net.w.rows()));
  }
  const Mat z = matmul(x, net.w);
  Vec out(x.rows(), 0.0);
  for (std::size_t j = 0; j < x.rows(); ++j) {
    auto zj = z.row(j);
    double s = 0.0;
    for (std::size_t i = 0; i < zj.size(); ++i) {
      if (zj[i] > 0.0) s += zj[i] * net.alpha[i];
    }
    out[j] = s;
  }
  return out;
}

Vec forward(const TwoLayerNet& net, const Dataset& data) { return forward(net, data.x); }

double loss_sq(const TwoLayerNet& net, const Dataset& data) {
  data.validate();
  const Vec f = forward(net, data);
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double r = f[j] - data.y[j];
    s += r * r;
  }
  return 0.5 * s;
}

Gradient grad(const TwoLayerNet& net, const Dataset& data) {
  data.validate();
  const Mat z = matmul(data.x, net.w);
  const std::size_t n = data.n();
  const std::size_t m = net.width();
  const std::size_t d = net.input_dim();
  Vec r(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (z(j, i) > 0.0) s += z(j, i) * net.alpha[i];
    r[j] = s - data.y[j];
  }
  Gradient g{Mat(d, m), Vec(m, 0.0)};
  for (std::size_t j = 0; j < n; ++j) {
    if (r[j] == 0.0) continue;
    auto xj = data.x.row(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(z(j, i) > 0.0)) continue;
      g.alpha[i] += r[j] * z(j, i);
      const double c = r[j] * net.alpha[i];
      for (std::size_t k = 0; k < d; ++k) g.w(k, i) += c * xj[k];
    }
  }
  return g;
}

std::vector<std::uint8_t> activation_pattern(const Mat& x, std::span<const double> h) {
  const Vec z = matvec(x, h);
  std::vector<std::uint8_t> p(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) p[j] = z[j] >= 0.0 ? 1 : 0;
  return p;
}

ConstraintValues constraint_values(const TwoLayerNet& net, NormKind norm) {
  return {matrix_norm(net.w, norm), vector_norm(net.alpha, norm)};
}

bool in_solution_set(const TwoLayerNet& net, const Dataset& data, double tol) {
  data.validate();
  const Vec f = forward(net, data);
  return max_abs_diff(f, data.y) <= tol;
}

bool in_reg_set(const TwoLayerNet& net, const Dataset& data, const RegSetSpec& spec, double tol) {
  spec.validate();
  if (spec.width != net.width()) {
    throw UsageError("in_reg_set: spec width " + std::to_string(spec.width) + " != net width " +
                     std::to_string(net.width()));
  }
  if (!in_solution_set(net, data, tol)) return false;
  return constraint_values(net, spec.norm).max() <= spec.radius() + tol;
}

double stable_rank(const Mat& a) {
  if (a.empty() || norm_inf(a.data()) == 0.0) throw UsageError("stable_rank: zero matrix");
  const Vec s = svd(a).sigma;
  double num = 0.0;
  for (double v : s) num += v * v;
  return num / (s.front() * s.front());
}

TeacherProblem gen_teacher_data(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t teacher_width) {
  if (n == 0 || d == 0 || teacher_width == 0) {
    throw UsageError("gen_teacher_data: n, d and teacher_width must be at least 1");
  }
  const Rng root(seed);
  Rng data_rng = root.substream("data");
  Rng teacher_rng = root.substream("teacher");
  Mat x(n, d);
  for (double& v : x.data()) v = data_rng.normal();
  Mat w(d, teacher_width);
  for (double& v : w.data()) v = teacher_rng.normal();
  Vec alpha(teacher_width);
  for (double& v : alpha) v = teacher_rng.normal();
  TeacherProblem out{Dataset{std::move(x), {}}, TwoLayerNet(std::move(w), std::move(alpha))};
  out.data.y = forward(out.teacher, out.data);
  return out;
}

}  // namespace connectikit
