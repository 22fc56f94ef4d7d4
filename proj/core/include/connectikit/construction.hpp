// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "connectikit/paths.hpp"
#include "connectikit/relu_net.hpp"

namespace connectikit {

/// Dataset X = [A; -A], y = 1 (length 2d) with A = B^{-1}, where B has first row
/// [(1+L)/2, (1-L)/(2(d-1)), ...] and rows i >= 2 equal to 1/2 in column 1, -1/(2(d-1)) off the
/// diagonal and 1 - 1/(2(d-1)) on the diagonal. Every row of B sums to 1.
struct Construction {
  std::size_t d = 0;
  double L = 0.0;
  Mat b;
  Mat a;
  Dataset data;

  /// All-ones vector.
  [[nodiscard]] Vec h1() const;
  /// (1, -1, ..., -1).
  [[nodiscard]] Vec h2() const;
};

/// Throws UsageError unless d >= 2 and 1 < L < sqrt(d).
Construction build_construction(std::size_t d, double L);

using Sigma = std::vector<int>;

/// Width-2 interpolator W_1 = B y_sigma / alpha1, W_2 = B y_{-sigma} / alpha2 with
/// (y_sigma)_i = y_i for sigma_i = +1 and -y_{i+d} otherwise.
TwoLayerNet component_point(const Construction& c, const Sigma& sigma, double alpha1, double alpha2);

/// sign(A W_1). Throws PreconditionError if the net does not interpolate or a coordinate is
/// within tol of zero.
Sigma component_of(const Construction& c, const TwoLayerNet& net, double tol = kMembershipTol);

/// sigma and -sigma index the same component up to swapping the two neurons.
bool same_component_class(const Sigma& s1, const Sigma& s2);

struct ComponentNorms {
  double r_inf = 0.0;
  double r_op = 0.0;
};

/// Closed forms: r_inf = ||B sigma||_inf^{1/2}, r_op = sqrt(2 ||B sigma||_2).
ComponentNorms component_norms(const Construction& c, const Sigma& sigma);

/// Minimizes max{R(W(alpha)), R_vec(alpha)} over a log-spaced (alpha1, alpha2) grid with
/// iterative zoom. Works for any positive y.
ComponentNorms component_norms_brute(const Construction& c, const Sigma& sigma, std::size_t grid = 64);

/// The same minimization for the generic component W = [p/alpha1, q/alpha2].
ComponentNorms cpq_norms_brute(const Vec& p, const Vec& q, std::size_t grid = 64);
/// (||p||^2 + ||q||^2 + 2|p.q|)^{1/4}.
double cpq_op_closed_form(const Vec& p, const Vec& q);

/// Optimally balanced component point for the given norm (max-entry or operator).
TwoLayerNet balanced_component_point(const Construction& c, const Sigma& sigma, NormKind norm);

struct NormLadder {
  double r_inf_1 = 0.0;
  double r_inf_2 = 0.0;
  double r_op_1 = 0.0;
  double r_op_2 = 0.0;
  std::vector<Sigma> argmin_inf;
  std::vector<Sigma> argmin_op;
  std::vector<Sigma> runner_up_inf;
  std::vector<Sigma> runner_up_op;
};

/// Exhaustive over the 2^{d-1} sigmas with sigma_1 = +1 (negations give identical values);
/// argmin lists include both signs. Values within 1e-12 (relative) of the minimum tie.
/// Throws UsageError for d > 22.
NormLadder norm_ladder(const Construction& c, std::size_t threads = 1);

struct LadderRow {
  std::uint64_t sigma_id = 0;  ///< bit k set when sigma_{k+1} = -1
  double r_inf = 0.0;
  double r_op = 0.0;
};
std::vector<LadderRow> ladder_table(const Construction& c);
Sigma sigma_from_id(std::uint64_t id, std::size_t d);

/// Predicted runner-up values for L = sqrt(d)/2 (as published for d >= 16).
double predicted_r_inf_2(std::size_t d);
/// General-L runner-up of the max-entry ladder: (1 + max{L-1, 1}/(d-1))^{1/2}.
double predicted_r_inf_2_general(std::size_t d, double L);
/// sqrt(2) * [min{d, (L - (L-1)/(d-1))^2 + 4 - 3/(d-1)}]^{1/4}.
double predicted_r_op_2(std::size_t d, double L);

struct Window {
  double lo = 0.0;  ///< inclusive
  double hi = 0.0;  ///< exclusive
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
};

/// Ranges of 1/lambda for AdamW (max-entry ladder) and Muon (operator ladder).
struct LambdaWindows {
  Window inv_lambda_adamw;
  Window inv_lambda_muon;
};

/// Throws UsageError when a ladder is degenerate (r_1 == r_2).
LambdaWindows lambda_windows(const NormLadder& ladder);

struct BarrierWitness {
  double t_star = 0.0;
  double loss = 0.0;
  std::size_t coordinate = 0;
};

/// Scans `samples` points for the first sign change of a coordinate of A W_1(t), bisects it to
/// `bisect_tol` in t and returns the loss there. Throws PreconditionError if both endpoints
/// lie in the same component class or no crossing is found.
BarrierWitness barrier_witness(const Construction& c, const PiecewisePath& path, double bisect_tol = 1e-12,
                               std::size_t samples = 1001);

}  // namespace connectikit
