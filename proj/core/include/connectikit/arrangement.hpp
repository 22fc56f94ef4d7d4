// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "connectikit/relu_net.hpp"

namespace connectikit {

using Pattern = std::vector<std::uint8_t>;

/// Distinct activation patterns 1(X h >= 0), sorted in ascending lexicographic order, each
/// with a realizing direction h.
struct PatternSet {
  std::vector<Pattern> patterns;
  /// witnesses[k] realizes patterns[k]: rows with pattern 0 have x.h < 0, rows with pattern 1
  /// have x.h >= 0 up to rounding when h lies on that row's hyperplane.
  std::vector<Vec> witnesses;
  /// True when enumeration is exact (d <= 2); otherwise sampling plus a closure check.
  bool exact = false;

  [[nodiscard]] std::size_t count() const { return patterns.size(); }
  [[nodiscard]] std::optional<std::size_t> index_of(const Pattern& p) const;
};

/// d <= 2: exact cell enumeration. d in {3, 4}: random and nullspace sampling followed by a
/// closure pass that LP-tests every single-bit flip of each found pattern until no new
/// pattern appears. Throws UsageError for d > 4.
PatternSet enum_patterns(const Mat& x, std::uint64_t seed = 0);
PatternSet enum_patterns(const Dataset& data, std::uint64_t seed = 0);

/// LP check: is there h with 1(X h >= 0) = p exactly (inactive rows relaxed to <= -eps)?
std::optional<Vec> realize_pattern(const Mat& x, const Pattern& p, double eps = 1.0);

/// Signed per-pattern neuron counts (t for positive output weight, s for negative).
struct SupportVector {
  std::vector<std::size_t> t;
  std::vector<std::size_t> s;

  [[nodiscard]] std::size_t mass() const;
  [[nodiscard]] bool leq(const SupportVector& o) const;
  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const SupportVector&, const SupportVector&) = default;
  friend auto operator<=>(const SupportVector&, const SupportVector&) = default;
};

/// Witness of the convexified (t, s) solution set: one (u_i, v_i) pair per pattern.
struct PtsWitness {
  std::vector<Vec> u;
  std::vector<Vec> v;
};

struct PtsResult {
  bool feasible = false;
  PtsWitness witness;
};

/// Strict sign rows use eps = 1e-6 * ||y||_inf.
double pattern_eps(const Dataset& data);

/// Feasibility of the system with exactly the blocks in `active` (u for t-blocks, v for
/// s-blocks; indices 0..P-1 are u, P..2P-1 are v) carrying sign constraints and all other
/// blocks pinned at zero.
PtsResult pts_feasible_active(const PatternSet& patterns, const Dataset& data, const SupportVector& ts,
                              double lambda, const std::vector<bool>& active);

/// Feasibility of P_(t,s): some sub-collection of the blocks allowed by (t, s) is active with
/// the exact pattern signs, the rest are zero. Upward-closed in (t, s).
PtsResult pts_feasible(const PatternSet& patterns, const Dataset& data, const SupportVector& ts, double lambda);

struct MinimalSupports {
  std::vector<SupportVector> supports;  ///< in order of discovery (increasing mass)
  bool truncated = false;
  std::size_t lp_calls = 0;
};

/// Minimal elements of {ts in [0, cap]^{2P} : pts_feasible}, found by exploring the lattice
/// level by level in increasing mass and skipping points above a known minimum.
MinimalSupports minimal_supports(const PatternSet& patterns, const Dataset& data, double lambda,
                                 std::size_t cap = 8);

/// 2 * max mass over the list. Throws UsageError if the list is empty.
std::size_t critical_width(const std::vector<SupportVector>& z_a);

/// Equalized interpolator from a P_(t,s) witness: for each pattern i, t_i neurons
/// (u_i lambda / t_i, 1/lambda) and s_i neurons (v_i lambda / s_i, -1/lambda), packed into the
/// lowest slots of a width-`width` net.
TwoLayerNet equalized_from_witness(const SupportVector& ts, const PtsWitness& witness, double lambda,
                                   std::size_t width);

// ---------------------------------------------------------------------------
// Heuristic estimators (nonconvex searches).

struct FitEstimate {
  double lambda_fit = 0.0;  ///< 1 / min_norm
  double min_norm = 0.0;    ///< best verified max{R(W), R_vec(alpha)} over interpolators found
  TwoLayerNet witness;
};

/// Multi-start projected-gradient search for a small-norm interpolator. Throws NumericError
/// ("no interpolator found") if no restart reaches loss below 1e-8.
FitEstimate lambda_fit_star(const Dataset& data, std::size_t width, NormKind norm, std::size_t restarts,
                            std::uint64_t seed);

struct OverlapVerdict {
  bool overlap_found = false;
  /// Present only when overlap_found; passes in_reg_set for both specs.
  std::optional<TwoLayerNet> witness;
  /// True for overlap_found (witness-checked); absence claims are heuristic.
  bool certified = false;
};

OverlapVerdict inter_overlap(const Dataset& data, std::size_t width, NormKind norm1, double lambda1,
                             NormKind norm2, double lambda2, std::size_t restarts, std::uint64_t seed);

struct Lambda2Estimate {
  double value = 0.0;
  bool unbracketed = false;
  bool heuristic = true;
  /// (lambda2 probed, overlap verdict) in probe order.
  std::vector<std::pair<double, bool>> trace;
};

Lambda2Estimate lambda2_star(const Dataset& data, std::size_t width, NormKind norm1, double lambda1,
                             NormKind norm2, double lo, double hi, std::size_t iters,
                             std::size_t restarts = 4, std::uint64_t seed = 0);

enum class Guarantee { Holds, Unknown };

struct RegimeReport {
  bool nonempty = false;
  Guarantee connectivity = Guarantee::Unknown;
  std::optional<double> lambda_c;  ///< sqrt((1/M)(m/4P - 1)) when M is given and m >= 4P
  std::vector<std::string> reasons;
  std::vector<std::string> warnings;
};

RegimeReport regime_check(const PatternSet& patterns, std::size_t m, double lambda, NormKind norm,
                          std::size_t m0, double lambda_fit, std::optional<std::size_t> m_star = std::nullopt,
                          std::optional<double> big_m = std::nullopt);

}  // namespace connectikit
