// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "connectikit/relu_net.hpp"

namespace connectikit {

enum class OptimizerKind { AdamW, Signum, NormMomGD, Muon };

std::string_view to_string(OptimizerKind kind);
/// Accepts "adamw", "signum", "normmom"/"normmomgd"/"nmgd", "muon" (case-insensitive).
OptimizerKind parse_optimizer_kind(std::string_view name);
bool is_lion_family(OptimizerKind kind);
/// Constraint norm the optimizer's limit points satisfy (its dual norm on the W block).
NormKind induced_norm(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::AdamW;
  double eta = 1e-3;
  double lambda = 0.0;
  double mu = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t steps = 1000;
  /// Muon only: replace the exact polar factor by 5 cubic Newton-Schulz iterations.
  bool newton_schulz = false;

  void validate() const;
};

struct OptState {
  Mat m_w;
  Vec m_alpha;
  Mat v_w;      ///< AdamW second moments (empty otherwise)
  Vec v_alpha;
  std::size_t step = 0;

  static OptState zeros_like(const TwoLayerNet& net, OptimizerKind kind);
};

struct StepResult {
  TwoLayerNet net;
  OptState state;
};

StepResult adamw_step(const TwoLayerNet& net, const OptState& state, const Gradient& g,
                      const OptimizerConfig& cfg);
StepResult lionk_step(const TwoLayerNet& net, const OptState& state, const Gradient& g,
                      const OptimizerConfig& cfg);
StepResult optimizer_step(const TwoLayerNet& net, const OptState& state, const Gradient& g,
                          const OptimizerConfig& cfg);

/// Gradient of K at the momentum for each Lion-K member. Zero input gives zero output.
Mat lionk_direction(const Mat& m, OptimizerKind kind, bool newton_schulz = false);
Vec lionk_direction(std::span<const double> m, OptimizerKind kind);

/// Polar factor approximation: X <- 1.5 X - 0.5 X X^T X, after scaling by the Frobenius norm.
Mat newton_schulz_orthogonalize(const Mat& m, int iterations = 5);

struct TrainResult {
  TwoLayerNet net;
  std::vector<double> losses;  ///< loss before each step, plus the final loss
  std::size_t steps_run = 0;
  bool converged = false;      ///< loss dropped below 1e-8
};

inline constexpr double kConvergedLoss = 1e-8;
inline constexpr double kDivergedLoss = 1e12;

/// Initial parameters ~ init_scale * N(0, 1) from the "init" substream of `seed`.
TwoLayerNet random_init(std::size_t d, std::size_t width, std::uint64_t seed, double init_scale);

/// Full-batch training; stops early once the loss is below kConvergedLoss.
/// Throws NumericError when the loss exceeds kDivergedLoss or becomes non-finite.
TrainResult train(const Dataset& data, std::size_t width, const OptimizerConfig& cfg,
                  std::uint64_t seed, double init_scale);
TrainResult train_from(const Dataset& data, TwoLayerNet init, const OptimizerConfig& cfg);

struct DualNormReport {
  NormKind norm = NormKind::MaxEntry;
  double value_w = 0.0;
  double value_alpha = 0.0;
  double bound = 0.0;
  double slack = 0.05;
  bool pass = false;
};

DualNormReport dual_norm_check(const TwoLayerNet& net, const OptimizerConfig& cfg, double slack = 0.05);

bool lion_stationary_check(const TwoLayerNet& net, const Dataset& data, const OptimizerConfig& cfg,
                           double tol);

}  // namespace connectikit
