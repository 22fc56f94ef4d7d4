// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "connectikit/arrangement.hpp"
#include "connectikit/relu_net.hpp"

namespace connectikit {

enum class SegmentKind {
  Linear,
  SqrtSwap,
  Merge,
  Shrink,
  HomogeneousRescale,
  DeltaAverage,
  DisjointInterp,
  PolychainLeg,
};

std::string_view to_string(SegmentKind kind);
SegmentKind parse_segment_kind(std::string_view name);

/// One closed-form piece u in [0, 1] -> net. Which fields are meaningful depends on `kind`:
///   Linear, PolychainLeg:  (1-u) base + u other
///   SqrtSwap:              neuron i moves into the zero slot j via sqrt(1-u), sqrt(u) weights
///   Merge:                 neuron i is folded into neuron j (same pattern and output sign)
///   Shrink:                the surviving half of dead neuron i goes linearly to zero
///   HomogeneousRescale:    alpha_k -> targets_k linearly, W_k alpha_k held fixed
///   DeltaAverage:          columns of each group move linearly to the group mean
///   DisjointInterp:        sqrt(1-u) base + sqrt(u) other (supports must be disjoint)
/// `reversed` evaluates the piece at 1-u.
struct Segment {
  SegmentKind kind = SegmentKind::Linear;
  TwoLayerNet base;
  TwoLayerNet other;
  std::size_t i = 0;
  std::size_t j = 0;
  Vec targets;
  std::vector<std::vector<std::size_t>> groups;
  bool reversed = false;

  [[nodiscard]] TwoLayerNet at(double u) const;
  [[nodiscard]] TwoLayerNet start() const { return at(0.0); }
  [[nodiscard]] TwoLayerNet end() const { return at(1.0); }
};

/// Continuous curve made of segments; the global parameter is split uniformly, segment k
/// covering [k/S, (k+1)/S].
class PiecewisePath {
 public:
  PiecewisePath() = default;
  explicit PiecewisePath(std::vector<Segment> segments);

  [[nodiscard]] TwoLayerNet at(double t) const;
  [[nodiscard]] TwoLayerNet start() const;
  [[nodiscard]] TwoLayerNet end() const;
  [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }
  [[nodiscard]] std::size_t size() const { return segments_.size(); }
  [[nodiscard]] bool empty() const { return segments_.empty(); }

  /// Appends after checking that the new piece starts where the path ends (within 1e-12).
  void append(Segment s);
  void append(const PiecewisePath& p);
  [[nodiscard]] PiecewisePath reversed() const;

  /// Constant single-segment path (a Linear segment with equal endpoints).
  static PiecewisePath constant(const TwoLayerNet& net);

 private:
  std::vector<Segment> segments_;
};

struct ProfileSample {
  double t = 0.0;
  double loss = 0.0;
  double r_w = 0.0;
  double r_alpha = 0.0;
  double stable_rank = 0.0;  ///< 0 when W is the zero matrix
};

struct PathProfile {
  std::vector<ProfileSample> samples;
  double barrier = 0.0;
  double max_loss = 0.0;
  double max_r_w = 0.0;
  double max_r_alpha = 0.0;
};

/// Samples t_k = k/(n-1). Norm columns use spec.norm (and its vector counterpart for alpha).
/// Evaluation is spread over `threads` workers (0 means hardware concurrency).
PathProfile eval_path(const PiecewisePath& path, const Dataset& data, const RegSetSpec& spec,
                      std::size_t n_samples = 1001, std::size_t threads = 1);

PiecewisePath linear_path(const TwoLayerNet& a, const TwoLayerNet& b);
PiecewisePath swap_path(const TwoLayerNet& net, std::size_t i, std::size_t j);
PiecewisePath merge_path(const TwoLayerNet& net, std::size_t i, std::size_t j, const Dataset& data);
PiecewisePath shrink_path(const TwoLayerNet& net, std::size_t i);
/// Max-norm equalization: shrink dead neurons, rescale output weights to +-1/lambda, then
/// average first-layer columns within each (pattern, sign) group.
PiecewisePath equalize_path(const TwoLayerNet& net, const Dataset& data, const RegSetSpec& spec,
                            double tol = kMembershipTol);
PiecewisePath disjoint_interp_path(const TwoLayerNet& a, const TwoLayerNet& b);
PiecewisePath homogeneous_rescale_path(const TwoLayerNet& net, const Vec& targets);

/// Moves neuron i into slot j. If both are nonzero, routes through the lowest-index zero slot
/// with three swaps; throws PreconditionError if there is none.
PiecewisePath move_neuron(const TwoLayerNet& net, std::size_t i, std::size_t j);

struct ConnectOptions {
  double tol = kMembershipTol;
  std::size_t verify_samples = 1001;
  /// Max-norm pipeline inputs; computed from the data when absent.
  std::optional<PatternSet> patterns;
  std::optional<std::vector<SupportVector>> z_a;
  std::size_t support_cap = 8;
};

/// Zero-loss path inside the regularized set between two of its members. Throws
/// PreconditionError for endpoints outside the set or insufficient width, and NumericError if
/// any of the verification samples leaves the set.
PiecewisePath connect_intra(const TwoLayerNet& a, const TwoLayerNet& b, const Dataset& data, const RegSetSpec& spec,
                            const ConnectOptions& opts = {});

enum class AlignMode { Weights, Activations };

struct Alignment {
  TwoLayerNet aligned;               ///< b with neurons permuted
  std::vector<std::size_t> perm;     ///< aligned.neuron(i) = b.neuron(perm[i])
};

Alignment align_permutation(const TwoLayerNet& a, const TwoLayerNet& b, AlignMode mode,
                            const Dataset* data = nullptr);

struct PolychainConfig {
  std::size_t iterations = 2000;
  double lr = 1e-2;
  double t_lo = 0.4;
  double t_hi = 0.6;
  std::uint64_t seed = 0;
};

struct PolychainFit {
  PiecewisePath path;
  TwoLayerNet bend;
  std::vector<double> losses;  ///< loss at the sampled t for each iteration
};

/// Two-leg path a -> bend -> b with the bend trained by plain gradient descent on the loss at
/// t ~ Uniform(t_lo, t_hi). Throws NumericError on divergence.
PolychainFit polychain_fit(const TwoLayerNet& a, const TwoLayerNet& b, const Dataset& data,
                           const PolychainConfig& cfg);

/// Two-leg path through an explicit bend point.
PiecewisePath polychain_path(const TwoLayerNet& a, const TwoLayerNet& bend, const TwoLayerNet& b);

}  // namespace connectikit
