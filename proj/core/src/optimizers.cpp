// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/optimizers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "connectikit/error.hpp"
#include "connectikit/rng.hpp"

namespace connectikit {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::AdamW: return "adamw";
    case OptimizerKind::Signum: return "signum";
    case OptimizerKind::NormMomGD: return "normmom";
    case OptimizerKind::Muon: return "muon";
  }
  return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "adamw") return OptimizerKind::AdamW;
  if (s == "signum" || s == "lion") return OptimizerKind::Signum;
  if (s == "normmom" || s == "normmomgd" || s == "nmgd") return OptimizerKind::NormMomGD;
  if (s == "muon") return OptimizerKind::Muon;
  throw UsageError("unknown optimizer '" + s + "'");
}

bool is_lion_family(OptimizerKind kind) { return kind != OptimizerKind::AdamW; }

NormKind induced_norm(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::AdamW:
    case OptimizerKind::Signum: return NormKind::MaxEntry;
    case OptimizerKind::NormMomGD: return NormKind::Frobenius;
    case OptimizerKind::Muon: return NormKind::Operator;
  }
  return NormKind::MaxEntry;
}

void OptimizerConfig::validate() const {
  if (!(eta > 0.0)) throw UsageError("optimizer: eta must be positive");
  if (lambda < 0.0) throw UsageError("optimizer: lambda must be nonnegative");
  if (lambda > 0.0 && !(eta < 1.0 / lambda)) throw UsageError("optimizer: need eta < 1/lambda");
  if (kind == OptimizerKind::AdamW) {
    if (!(0.0 <= beta1 && beta1 <= beta2 && beta2 < 1.0)) {
      throw UsageError("optimizer: AdamW needs 0 <= beta1 <= beta2 < 1");
    }
    if (!(eps > 0.0)) throw UsageError("optimizer: eps must be positive");
  } else if (!(0.0 <= mu && mu < 1.0)) {
    throw UsageError("optimizer: mu must lie in [0, 1)");
  }
}

OptState OptState::zeros_like(const TwoLayerNet& net, OptimizerKind kind) {
  OptState s;
  s.m_w = Mat(net.w.rows(), net.w.cols());
  s.m_alpha.assign(net.width(), 0.0);
  if (kind == OptimizerKind::AdamW) {
    s.v_w = Mat(net.w.rows(), net.w.cols());
    s.v_alpha.assign(net.width(), 0.0);
  }
  return s;
}

namespace {

void check_shapes(const TwoLayerNet& net, const OptState& state, const Gradient& g) {
  const bool ok = g.w.rows() == net.w.rows() && g.w.cols() == net.w.cols() && g.alpha.size() == net.width() &&
                  state.m_w.rows() == net.w.rows() && state.m_w.cols() == net.w.cols() &&
                  state.m_alpha.size() == net.width();
  if (!ok) throw UsageError("optimizer step: shape mismatch between net, state and gradient");
}

// AdamW on one block, elementwise.
void adamw_block(std::span<double> theta, std::span<double> m, std::span<double> v,
                 std::span<const double> g, const OptimizerConfig& cfg) {
  for (std::size_t k = 0; k < theta.size(); ++k) {
    m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
    v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
    const double update = m[k] / (std::sqrt(v[k]) + cfg.eps);
    theta[k] = theta[k] - cfg.eta * (update + cfg.lambda * theta[k]);
  }
}

}  // namespace

StepResult adamw_step(const TwoLayerNet& net, const OptState& state, const Gradient& g, const OptimizerConfig& cfg) {
  if (cfg.kind != OptimizerKind::AdamW) throw UsageError("adamw_step: config is not AdamW");
  check_shapes(net, state, g);
  StepResult r{net, state};
  if (r.state.v_w.empty()) {
    r.state.v_w = Mat(net.w.rows(), net.w.cols());
    r.state.v_alpha.assign(net.width(), 0.0);
  }
  adamw_block(r.net.w.data(), r.state.m_w.data(), r.state.v_w.data(), g.w.data(), cfg);
  adamw_block(r.net.alpha, r.state.m_alpha, r.state.v_alpha, g.alpha, cfg);
  ++r.state.step;
  return r;
}

Mat newton_schulz_orthogonalize(const Mat& m, int iterations) {
  const double f = norm2(m.data());
  if (f == 0.0) return Mat(m.rows(), m.cols());
  Mat x = (1.0 / f) * m;
  for (int it = 0; it < iterations; ++it) {
    const Mat xxt_x = matmul(matmul(x, x.transpose()), x);
    x = 1.5 * x - 0.5 * xxt_x;
  }
  return x;
}

Mat lionk_direction(const Mat& m, OptimizerKind kind, bool newton_schulz) {
  Mat out(m.rows(), m.cols());
  switch (kind) {
    case OptimizerKind::Signum: {
      auto o = out.data();
      auto src = m.data();
      for (std::size_t k = 0; k < src.size(); ++k) o[k] = src[k] > 0.0 ? 1.0 : (src[k] < 0.0 ? -1.0 : 0.0);
      return out;
    }
    case OptimizerKind::NormMomGD: {
      const double f = norm2(m.data());
      if (f == 0.0) return out;
      return (1.0 / f) * m;
    }
    case OptimizerKind::Muon: {
      if (norm_inf(m.data()) == 0.0) return out;
      if (newton_schulz) return newton_schulz_orthogonalize(m);
      const SvdResult s = svd(m);
      const double cutoff = 1e-12 * s.sigma.front();
      for (std::size_t k = 0; k < s.sigma.size(); ++k) {
        if (s.sigma[k] <= cutoff) break;
        for (std::size_t i = 0; i < m.rows(); ++i) {
          const double uik = s.u(i, k);
          if (uik == 0.0) continue;
          for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) += uik * s.vt(k, j);
        }
      }
      return out;
    }
    case OptimizerKind::AdamW: break;
  }
  throw UsageError("lionk_direction: AdamW is not a Lion-K member");
}

Vec lionk_direction(std::span<const double> m, OptimizerKind kind) {
  Vec out(m.size(), 0.0);
  switch (kind) {
    case OptimizerKind::Signum:
      for (std::size_t k = 0; k < m.size(); ++k) out[k] = m[k] > 0.0 ? 1.0 : (m[k] < 0.0 ? -1.0 : 0.0);
      return out;
    case OptimizerKind::NormMomGD:
    case OptimizerKind::Muon: {
      // For a vector the nuclear norm is the l2 norm, so both reduce to normalization.
      const double n = norm2(m);
      if (n == 0.0) return out;
      for (std::size_t k = 0; k < m.size(); ++k) out[k] = m[k] / n;
      return out;
    }
    case OptimizerKind::AdamW: break;
  }
  throw UsageError("lionk_direction: AdamW is not a Lion-K member");
}

StepResult lionk_step(const TwoLayerNet& net, const OptState& state, const Gradient& g, const OptimizerConfig& cfg) {
  if (!is_lion_family(cfg.kind)) throw UsageError("lionk_step: config is not a Lion-K optimizer");
  check_shapes(net, state, g);
  StepResult r{net, state};
  auto mw = r.state.m_w.data();
  for (std::size_t k = 0; k < mw.size(); ++k) mw[k] = cfg.mu * mw[k] + g.w.data()[k];
  for (std::size_t k = 0; k < r.state.m_alpha.size(); ++k) {
    r.state.m_alpha[k] = cfg.mu * r.state.m_alpha[k] + g.alpha[k];
  }
  const Mat vw = lionk_direction(r.state.m_w, cfg.kind, cfg.newton_schulz);
  const Vec va = lionk_direction(r.state.m_alpha, cfg.kind);
  auto w = r.net.w.data();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = w[k] - cfg.eta * (vw.data()[k] + cfg.lambda * w[k]);
  for (std::size_t k = 0; k < r.net.alpha.size(); ++k) {
    r.net.alpha[k] = r.net.alpha[k] - cfg.eta * (va[k] + cfg.lambda * r.net.alpha[k]);
  }
  ++r.state.step;
  return r;
}

StepResult optimizer_step(const TwoLayerNet& net, const OptState& state, const Gradient& g,
                          const OptimizerConfig& cfg) {
  return cfg.kind == OptimizerKind::AdamW ? adamw_step(net, state, g, cfg) : lionk_step(net, state, g, cfg);
}

TwoLayerNet random_init(std::size_t d, std::size_t width, std::uint64_t seed, double init_scale) {
  if (width == 0 || d == 0) throw UsageError("random_init: width and input dimension must be positive");
  Rng rng = Rng(seed).substream("init");
  TwoLayerNet net = TwoLayerNet::zeros(d, width);
  for (double& v : net.w.data()) v = init_scale * rng.normal();
  for (double& v : net.alpha) v = init_scale * rng.normal();
  return net;
}

TrainResult train_from(const Dataset& data, TwoLayerNet init, const OptimizerConfig& cfg) {
  cfg.validate();
  data.validate();
  if (init.input_dim() != data.d()) throw UsageError("train: data dimension does not match the net");
  TrainResult out;
  out.net = std::move(init);
  OptState state = OptState::zeros_like(out.net, cfg.kind);
  out.losses.reserve(cfg.steps + 1);
  for (std::size_t step = 0;; ++step) {
    const double loss = loss_sq(out.net, data);
    out.losses.push_back(loss);
    if (!std::isfinite(loss) || loss > kDivergedLoss) {
      throw NumericError("train: diverged at step " + std::to_string(step) + " (loss " + std::to_string(loss) + ")");
    }
    if (loss < kConvergedLoss) {
      out.converged = true;
      break;
    }
    if (step == cfg.steps) break;
    StepResult r = optimizer_step(out.net, state, grad(out.net, data), cfg);
    out.net = std::move(r.net);
    state = std::move(r.state);
    out.steps_run = step + 1;
  }
  return out;
}

TrainResult train(const Dataset& data, std::size_t width, const OptimizerConfig& cfg, std::uint64_t seed,
                  double init_scale) {
  return train_from(data, random_init(data.d(), width, seed, init_scale), cfg);
}

DualNormReport dual_norm_check(const TwoLayerNet& net, const OptimizerConfig& cfg, double slack) {
  if (!(cfg.lambda > 0.0)) throw UsageError("dual_norm_check: lambda must be positive");
  DualNormReport r;
  r.norm = induced_norm(cfg.kind);
  const ConstraintValues v = constraint_values(net, r.norm);
  r.value_w = v.w;
  r.value_alpha = v.alpha;
  r.bound = 1.0 / cfg.lambda;
  r.slack = slack;
  r.pass = v.max() <= r.bound * (1.0 + slack);
  return r;
}

bool lion_stationary_check(const TwoLayerNet& net, const Dataset& data, const OptimizerConfig& cfg, double tol) {
  if (!is_lion_family(cfg.kind)) throw UsageError("lion_stationary_check: config is not a Lion-K optimizer");
  if (loss_sq(net, data) > tol) return false;
  const ConstraintValues v = constraint_values(net, induced_norm(cfg.kind));
  return cfg.lambda * v.w <= 1.0 + tol && cfg.lambda * v.alpha <= 1.0 + tol;
}

}  // namespace connectikit
