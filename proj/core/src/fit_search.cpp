// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "connectikit/arrangement.hpp"
#include "connectikit/error.hpp"
#include "connectikit/rng.hpp"

namespace connectikit {

namespace {

using Projection = std::function<TwoLayerNet(const TwoLayerNet&)>;

constexpr double kTargetLoss = 1e-16;

// Euclidean projection of both blocks onto the ball of radius r in the given norm.
TwoLayerNet project_ball(const TwoLayerNet& net, NormKind norm, double r) {
  TwoLayerNet out = net;
  switch (norm) {
    case NormKind::MaxEntry:
      for (double& v : out.w.data()) v = std::clamp(v, -r, r);
      for (double& v : out.alpha) v = std::clamp(v, -r, r);
      return out;
    case NormKind::Frobenius:
    case NormKind::Operator: {
      if (norm == NormKind::Frobenius) {
        const double f = norm2(out.w.data());
        if (f > r) out.w *= r / f;
      } else {
        const SvdResult s = svd(out.w);
        if (!s.sigma.empty() && s.sigma.front() > r) {
          Mat rebuilt(out.w.rows(), out.w.cols());
          for (std::size_t k = 0; k < s.sigma.size(); ++k) {
            const double sk = std::min(s.sigma[k], r);
            for (std::size_t i = 0; i < rebuilt.rows(); ++i)
              for (std::size_t j = 0; j < rebuilt.cols(); ++j) rebuilt(i, j) += s.u(i, k) * sk * s.vt(k, j);
          }
          out.w = std::move(rebuilt);
        }
      }
      const double a = norm2(out.alpha);
      if (a > r) {
        for (double& v : out.alpha) v *= r / a;
      }
      return out;
    }
    default: throw UsageError("projection: unsupported constraint norm");
  }
}

// Projected gradient descent with a step size adapted by success or failure of each step.
TwoLayerNet projected_descent(const Dataset& data, TwoLayerNet net, const Projection& proj, std::size_t iters,
                              double& loss_out) {
  net = proj(net);
  double loss = loss_sq(net, data);
  double step = 0.1;
  for (std::size_t it = 0; it < iters && loss > kTargetLoss; ++it) {
    const Gradient g = grad(net, data);
    TwoLayerNet cand = net;
    auto cw = cand.w.data();
    for (std::size_t k = 0; k < cw.size(); ++k) cw[k] -= step * g.w.data()[k];
    for (std::size_t k = 0; k < cand.alpha.size(); ++k) cand.alpha[k] -= step * g.alpha[k];
    cand = proj(cand);
    const double lc = loss_sq(cand, data);
    if (lc < loss) {
      net = std::move(cand);
      loss = lc;
      step = std::min(step * 1.5, 1e3);
    } else {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
  loss_out = loss;
  return net;
}

// Minimum-norm Gauss-Newton corrections of the residual at fixed activation pattern.
TwoLayerNet polish(const Dataset& data, TwoLayerNet net) {
  const std::size_t n = data.n(), d = data.d(), m = net.width();
  for (int it = 0; it < 6; ++it) {
    const Vec f = forward(net, data);
    Vec r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = f[j] - data.y[j];
    if (norm_inf(r) < 1e-15 * std::max(1.0, norm_inf(data.y))) break;
    const Mat z = matmul(data.x, net.w);
    Mat jac(n, d * m + m);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        if (!(z(j, i) > 0.0)) continue;
        for (std::size_t k = 0; k < d; ++k) jac(j, k * m + i) = net.alpha[i] * data.x(j, k);
        jac(j, d * m + i) = z(j, i);
      }
    }
    const SvdResult s = svd(jac);
    if (s.sigma.empty() || s.sigma.front() == 0.0) break;
    const double cutoff = 1e-10 * s.sigma.front();
    Vec delta(d * m + m, 0.0);
    for (std::size_t k = 0; k < s.sigma.size(); ++k) {
      if (s.sigma[k] <= cutoff) break;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) c += s.u(j, k) * r[j];
      c /= s.sigma[k];
      for (std::size_t p = 0; p < delta.size(); ++p) delta[p] -= c * s.vt(k, p);
    }
    TwoLayerNet cand = net;
    for (std::size_t k = 0; k < d * m; ++k) cand.w.data()[k] += delta[k];
    for (std::size_t i = 0; i < m; ++i) cand.alpha[i] += delta[d * m + i];
    if (loss_sq(cand, data) >= loss_sq(net, data)) break;
    net = std::move(cand);
  }
  return net;
}

TwoLayerNet random_start(std::size_t d, std::size_t width, Rng& rng, double scale) {
  TwoLayerNet net = TwoLayerNet::zeros(d, width);
  for (double& v : net.w.data()) v = scale * rng.normal();
  for (double& v : net.alpha) v = scale * rng.normal();
  return net;
}

double start_scale(const Dataset& data, std::size_t width) {
  const double y = std::max(norm_inf(data.y), 1e-12);
  return std::sqrt(y / static_cast<double>(width));
}

// Unconstrained fit from a random start; returns false if the loss stalls above target.
bool fit_unconstrained(const Dataset& data, TwoLayerNet& net) {
  double loss = 0.0;
  net = projected_descent(data, net, [](const TwoLayerNet& v) { return v; }, 20000, loss);
  net = polish(data, net);
  return in_solution_set(net, data, 1e-9);
}

// Random starts fitted without constraints; a start whose neurons cannot reach every sample
// stalls, so each restart draws up to kStartDraws starts before giving up.
constexpr int kStartDraws = 8;

bool fitted_start(const Dataset& data, std::size_t width, Rng& rng, TwoLayerNet& net) {
  for (int k = 0; k < kStartDraws; ++k) {
    net = random_start(data.d(), width, rng, start_scale(data, width));
    if (fit_unconstrained(data, net)) return true;
  }
  return false;
}

}  // namespace

FitEstimate lambda_fit_star(const Dataset& data, std::size_t width, NormKind norm, std::size_t restarts,
                            std::uint64_t seed) {
  data.validate();
  if (width == 0) throw UsageError("lambda_fit_star: width must be positive");
  if (restarts == 0) throw UsageError("lambda_fit_star: need at least one restart");
  RegSetSpec probe{norm, 1.0, width};
  probe.validate();
  const Rng root = Rng(seed).substream("lambda_fit_star");
  FitEstimate best;
  best.min_norm = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng = root.substream(r);
    TwoLayerNet net;
    if (!fitted_start(data, width, rng, net)) continue;
    double radius = constraint_values(net, norm).max();
    double factor = 0.8;
    while (factor < 1.0 - 1e-5) {
      const double target = radius * factor;
      double loss = 0.0;
      TwoLayerNet cand = projected_descent(
          data, net, [&](const TwoLayerNet& v) { return project_ball(v, norm, target); }, 4000, loss);
      cand = polish(data, cand);
      const double value = constraint_values(cand, norm).max();
      if (in_solution_set(cand, data, 1e-9) && value < radius) {
        net = std::move(cand);
        radius = value;
      } else {
        factor = std::sqrt(factor);
      }
    }
    if (radius < best.min_norm) {
      best.min_norm = radius;
      best.witness = net;
    }
  }
  if (!std::isfinite(best.min_norm)) {
    throw NumericError("lambda_fit_star: no interpolator found (all restarts stalled above loss 1e-8)");
  }
  best.lambda_fit = 1.0 / best.min_norm;
  return best;
}

OverlapVerdict inter_overlap(const Dataset& data, std::size_t width, NormKind norm1, double lambda1, NormKind norm2,
                             double lambda2, std::size_t restarts, std::uint64_t seed) {
  data.validate();
  const RegSetSpec spec1{norm1, lambda1, width};
  const RegSetSpec spec2{norm2, lambda2, width};
  spec1.validate();
  spec2.validate();
  if (restarts == 0) throw UsageError("inter_overlap: need at least one restart");
  const double margin = 1.0 - 1e-7;
  const Rng root = Rng(seed).substream("inter_overlap");
  OverlapVerdict verdict;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng = root.substream(r);
    TwoLayerNet net;
    if (!fitted_start(data, width, rng, net)) continue;
    // Shrink both radii geometrically from the current values toward the targets.
    const double start1 = std::max(constraint_values(net, norm1).max(), spec1.radius());
    const double start2 = std::max(constraint_values(net, norm2).max(), spec2.radius());
    constexpr int kStages = 12;
    bool ok = true;
    for (int stage = 1; stage <= kStages && ok; ++stage) {
      const double frac = static_cast<double>(stage) / kStages;
      const double r1 = start1 * std::pow(spec1.radius() / start1, frac) * (stage == kStages ? margin : 1.0);
      const double r2 = start2 * std::pow(spec2.radius() / start2, frac) * (stage == kStages ? margin : 1.0);
      const Projection proj = [&](const TwoLayerNet& v) {
        TwoLayerNet p = v;
        for (int k = 0; k < 8; ++k) p = project_ball(project_ball(p, norm2, r2), norm1, r1);
        return p;
      };
      double loss = 0.0;
      net = projected_descent(data, net, proj, 4000, loss);
      ok = loss < 1e-6;
    }
    if (!ok) continue;
    net = polish(data, net);
    if (in_reg_set(net, data, spec1) && in_reg_set(net, data, spec2)) {
      verdict.overlap_found = true;
      verdict.certified = true;
      verdict.witness = net;
      return verdict;
    }
  }
  return verdict;
}

Lambda2Estimate lambda2_star(const Dataset& data, std::size_t width, NormKind norm1, double lambda1, NormKind norm2,
                             double lo, double hi, std::size_t iters, std::size_t restarts, std::uint64_t seed) {
  if (!(lo < hi) || !(lo > 0.0)) throw UsageError("lambda2_star: need 0 < lo < hi");
  Lambda2Estimate est;
  auto probe = [&](double l2) {
    const bool v = inter_overlap(data, width, norm1, lambda1, norm2, l2, restarts, seed).overlap_found;
    est.trace.emplace_back(l2, v);
    return v;
  };
  if (probe(hi)) {
    est.value = hi;
    est.unbracketed = true;
    return est;
  }
  if (!probe(lo)) {
    est.value = lo;
    est.unbracketed = true;
    return est;
  }
  for (std::size_t it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) ? lo : hi) = mid;
  }
  est.value = 0.5 * (lo + hi);
  return est;
}

}  // namespace connectikit
