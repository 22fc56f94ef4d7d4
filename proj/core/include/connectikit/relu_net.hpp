// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "connectikit/numerics.hpp"

namespace connectikit {

/// Default absolute tolerance for membership predicates (on the l-infinity residual).
inline constexpr double kMembershipTol = 1e-8;

/// f(x) = (x W)_+ alpha. Column i of `w` holds the first-layer weights of neuron i.
struct TwoLayerNet {
  Mat w;
  Vec alpha;

  TwoLayerNet() = default;
  TwoLayerNet(Mat w_, Vec alpha_);
  static TwoLayerNet zeros(std::size_t d, std::size_t m);

  [[nodiscard]] std::size_t input_dim() const { return w.rows(); }
  [[nodiscard]] std::size_t width() const { return alpha.size(); }
  [[nodiscard]] Vec neuron(std::size_t i) const { return w.col(i); }
  /// True when both the weight column and the output weight of neuron i are exactly zero.
  [[nodiscard]] bool neuron_is_zero(std::size_t i) const;
  [[nodiscard]] bool same_shape(const TwoLayerNet& o) const;
  void validate() const;

  friend bool operator==(const TwoLayerNet&, const TwoLayerNet&) = default;
};

/// (1-t) a + t b, entrywise.
TwoLayerNet lerp(const TwoLayerNet& a, const TwoLayerNet& b, double t);
double max_abs_diff(const TwoLayerNet& a, const TwoLayerNet& b);
/// Returns b' with b'.neuron(i) = b.neuron(perm[i]).
TwoLayerNet permute_neurons(const TwoLayerNet& net, std::span<const std::size_t> perm);
/// Flattened parameter vector: W row-major followed by alpha.
Vec flatten(const TwoLayerNet& net);
TwoLayerNet unflatten(std::span<const double> theta, std::size_t d, std::size_t m);

struct Dataset {
  Mat x;
  Vec y;

  [[nodiscard]] std::size_t n() const { return y.size(); }
  [[nodiscard]] std::size_t d() const { return x.cols(); }
  void validate() const;
};

/// Constraint description for the regularized solution set with radius 1/lambda.
struct RegSetSpec {
  NormKind norm = NormKind::Frobenius;
  double lambda = 1.0;
  std::size_t width = 0;

  void validate() const;
  [[nodiscard]] double radius() const { return 1.0 / lambda; }
};

Vec forward(const TwoLayerNet& net, const Mat& x);
Vec forward(const TwoLayerNet& net, const Dataset& data);
double loss_sq(const TwoLayerNet& net, const Dataset& data);

struct Gradient {
  Mat w;
  Vec alpha;
};

/// Gradient of loss_sq; the ReLU derivative at exactly 0 is taken to be 0.
Gradient grad(const TwoLayerNet& net, const Dataset& data);

/// 1(X h >= 0) as a byte vector.
std::vector<std::uint8_t> activation_pattern(const Mat& x, std::span<const double> h);

/// Block values (R(W), R_vec(alpha)) for the constraint norm.
struct ConstraintValues {
  double w = 0.0;
  double alpha = 0.0;
  [[nodiscard]] double max() const { return w > alpha ? w : alpha; }
};
ConstraintValues constraint_values(const TwoLayerNet& net, NormKind norm);

bool in_solution_set(const TwoLayerNet& net, const Dataset& data, double tol = kMembershipTol);
bool in_reg_set(const TwoLayerNet& net, const Dataset& data, const RegSetSpec& spec,
                double tol = kMembershipTol);

/// sum sigma_i^2 / sigma_max^2. Throws UsageError for the zero matrix.
double stable_rank(const Mat& a);

struct TeacherProblem {
  Dataset data;
  TwoLayerNet teacher;
};

/// X and the teacher's parameters are drawn from the "data" and "teacher" substreams of `seed`.
TeacherProblem gen_teacher_data(std::uint64_t seed, std::size_t n, std::size_t d,
                                std::size_t teacher_width);

}  // namespace connectikit
