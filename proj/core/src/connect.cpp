// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "connectikit/error.hpp"
#include "connectikit/paths.hpp"
#include "connectikit/rng.hpp"

namespace connectikit {

namespace {

bool is_active(const TwoLayerNet& net, std::size_t k) {
  if (net.alpha[k] == 0.0) return false;
  for (std::size_t r = 0; r < net.w.rows(); ++r)
    if (net.w(r, k) != 0.0) return true;
  return false;
}

void shrink_dead_neurons(PiecewisePath& path) {
  TwoLayerNet cur = path.end();
  for (std::size_t k = 0; k < cur.width(); ++k) {
    if (cur.neuron_is_zero(k) || is_active(cur, k)) continue;
    path.append(shrink_path(cur, k));
    cur = path.end();
  }
}

// Repeatedly merges the first pair (in order of pattern bitstring, output sign, index) that
// shares both, then removes dead neurons. The result has at most one active neuron per
// (pattern, sign).
PiecewisePath reduce_nonmergeable(const TwoLayerNet& net, const Dataset& data) {
  PiecewisePath path = PiecewisePath::constant(net);
  for (;;) {
    const TwoLayerNet cur = path.end();
    std::vector<std::tuple<Pattern, int, std::size_t>> keyed;
    for (std::size_t k = 0; k < cur.width(); ++k) {
      if (!is_active(cur, k)) continue;
      keyed.emplace_back(activation_pattern(data.x, cur.neuron(k)), cur.alpha[k] > 0.0 ? 1 : 0, k);
    }
    std::sort(keyed.begin(), keyed.end());
    bool merged = false;
    for (std::size_t q = 0; q + 1 < keyed.size(); ++q) {
      const auto& [p0, s0, k0] = keyed[q];
      const auto& [p1, s1, k1] = keyed[q + 1];
      if (p0 == p1 && s0 == s1) {
        path.append(merge_path(cur, k1, k0, data));
        merged = true;
        break;
      }
    }
    if (!merged) break;
  }
  shrink_dead_neurons(path);
  return path;
}

// Max-norm reduction: equalize, then interpolate linearly to the equalized solution built
// from the P_(t,s) witness of a minimal support below the current one, then drop the
// leftover neurons.
PiecewisePath reduce_equalized(const TwoLayerNet& net, const Dataset& data, const RegSetSpec& spec,
                               const PatternSet& patterns, const std::vector<SupportVector>& z_a, double tol) {
  PiecewisePath path = equalize_path(net, data, spec, tol);
  const TwoLayerNet cur = path.end();
  const std::size_t P = patterns.count();
  std::vector<std::vector<std::size_t>> pos(P), neg(P);
  SupportVector have{std::vector<std::size_t>(P, 0), std::vector<std::size_t>(P, 0)};
  for (std::size_t k = 0; k < cur.width(); ++k) {
    if (!is_active(cur, k)) continue;
    const auto idx = patterns.index_of(activation_pattern(data.x, cur.neuron(k)));
    if (!idx) throw NumericError("connect_intra: neuron pattern missing from the enumerated pattern set");
    (cur.alpha[k] > 0.0 ? pos : neg)[*idx].push_back(k);
    (cur.alpha[k] > 0.0 ? have.t : have.s)[*idx] += 1;
  }
  const SupportVector* target = nullptr;
  for (const auto& z : z_a) {
    if (z.leq(have) && (target == nullptr || z < *target)) target = &z;
  }
  if (target == nullptr) {
    throw NumericError("connect_intra: no minimal support lies below " + have.to_string() +
                       " (support search truncated?)");
  }
  std::vector<bool> active(2 * P, false);
  for (std::size_t b = 0; b < 2 * P; ++b) active[b] = (b < P ? target->t[b] : target->s[b - P]) > 0;
  const PtsResult lp = pts_feasible_active(patterns, data, *target, spec.lambda, active);
  if (!lp.feasible) throw NumericError("connect_intra: P_(t,s) system for " + target->to_string() + " is infeasible");

  TwoLayerNet next = cur;
  auto assign = [&](const std::vector<std::size_t>& slots, std::size_t keep, const Vec& block) {
    for (std::size_t q = 0; q < slots.size(); ++q) {
      for (std::size_t r = 0; r < next.w.rows(); ++r) {
        next.w(r, slots[q]) = q < keep ? block[r] * spec.lambda / static_cast<double>(keep) : 0.0;
      }
    }
  };
  for (std::size_t i = 0; i < P; ++i) {
    assign(pos[i], target->t[i], lp.witness.u[i]);
    assign(neg[i], target->s[i], lp.witness.v[i]);
  }
  path.append(linear_path(cur, next));
  shrink_dead_neurons(path);
  return path;
}

// Packs nonzero neurons into the lowest (or highest) slots, one sqrt-swap per move.
PiecewisePath compact(const TwoLayerNet& net, bool low) {
  PiecewisePath path = PiecewisePath::constant(net);
  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < net.width(); ++k)
    if (!net.neuron_is_zero(k)) used.push_back(k);
  const std::size_t m = net.width();
  if (low) {
    for (std::size_t q = 0; q < used.size(); ++q)
      if (used[q] != q) path.append(swap_path(path.end(), used[q], q));
  } else {
    for (std::size_t q = used.size(); q-- > 0;) {
      const std::size_t slot = m - (used.size() - q);
      if (used[q] != slot) path.append(swap_path(path.end(), used[q], slot));
    }
  }
  return path;
}

// Removes leading constant placeholders, keeping at least one segment.
PiecewisePath strip_constant_head(const PiecewisePath& p) {
  std::size_t first = 0;
  while (first + 1 < p.size()) {
    const Segment& s = p.segments()[first];
    if (s.kind != SegmentKind::Linear || !(s.base == s.other)) break;
    ++first;
  }
  return PiecewisePath(std::vector<Segment>(p.segments().begin() + static_cast<std::ptrdiff_t>(first), p.segments().end()));
}

}  // namespace

PiecewisePath connect_intra(const TwoLayerNet& a, const TwoLayerNet& b, const Dataset& data, const RegSetSpec& spec,
                            const ConnectOptions& opts) {
  spec.validate();
  data.validate();
  if (!a.same_shape(b)) throw UsageError("connect_intra: endpoint shapes differ");
  if (a.width() != spec.width) throw UsageError("connect_intra: spec width does not match the endpoints");
  if (a.input_dim() != data.d()) throw UsageError("connect_intra: data dimension does not match the endpoints");
  if (!in_reg_set(a, data, spec, opts.tol)) {
    throw PreconditionError("connect_intra: endpoint a is outside the regularized solution set");
  }
  if (!in_reg_set(b, data, spec, opts.tol)) {
    throw PreconditionError("connect_intra: endpoint b is outside the regularized solution set");
  }
  const PatternSet patterns = opts.patterns ? *opts.patterns : enum_patterns(data);
  const std::size_t P = patterns.count();
  const std::size_t m = spec.width;

  PiecewisePath ra, rb;
  if (spec.norm == NormKind::MaxEntry) {
    const std::vector<SupportVector> z_a =
        opts.z_a ? *opts.z_a : minimal_supports(patterns, data, spec.lambda, opts.support_cap).supports;
    if (z_a.empty()) throw PreconditionError("connect_intra: no feasible support found (regularized set may be empty)");
    const std::size_t m_star = critical_width(z_a);
    if (m < m_star) {
      throw PreconditionError("connect_intra: width " + std::to_string(m) + " is below the critical width m* = " +
                              std::to_string(m_star));
    }
    ra = reduce_equalized(a, data, spec, patterns, z_a, opts.tol);
    rb = reduce_equalized(b, data, spec, patterns, z_a, opts.tol);
  } else {
    if (m < 4 * P) {
      throw PreconditionError("connect_intra: width " + std::to_string(m) + " is below 4P = " + std::to_string(4 * P));
    }
    ra = reduce_nonmergeable(a, data);
    rb = reduce_nonmergeable(b, data);
  }
  ra.append(compact(ra.end(), true));
  rb.append(compact(rb.end(), false));
  const TwoLayerNet a2 = ra.end();
  const TwoLayerNet b2 = rb.end();
  for (std::size_t k = 0; k < m; ++k) {
    if (!a2.neuron_is_zero(k) && !b2.neuron_is_zero(k)) {
      throw PreconditionError("connect_intra: reduced endpoints overlap at slot " + std::to_string(k) +
                              "; width too small");
    }
  }
  PiecewisePath path = strip_constant_head(ra);
  path.append(disjoint_interp_path(a2, b2));
  path.append(strip_constant_head(rb).reversed());

  if (opts.verify_samples >= 2) {
    for (std::size_t k = 0; k < opts.verify_samples; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(opts.verify_samples - 1);
      if (!in_reg_set(path.at(t), data, spec, opts.tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "connect_intra: path leaves the regularized solution set at t = " << t;
        throw NumericError(os.str());
      }
    }
  }
  return path;
}

Alignment align_permutation(const TwoLayerNet& a, const TwoLayerNet& b, AlignMode mode, const Dataset* data) {
  if (!a.same_shape(b)) throw UsageError("align_permutation: shapes differ");
  const std::size_t m = a.width();
  Mat cost(m, m);
  if (mode == AlignMode::Weights) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = a.alpha[i] * b.alpha[j];
        for (std::size_t r = 0; r < a.w.rows(); ++r) s += a.w(r, i) * b.w(r, j);
        cost(i, j) = -s;
      }
    }
  } else {
    if (data == nullptr) throw UsageError("align_permutation: activation matching needs a dataset");
    const Mat za = matmul(data->x, a.w);
    const Mat zb = matmul(data->x, b.w);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t n = 0; n < za.rows(); ++n) s += std::max(za(n, i), 0.0) * std::max(zb(n, j), 0.0);
        cost(i, j) = -s;
      }
    }
  }
  const Assignment asg = solve_assignment(cost);
  return {permute_neurons(b, asg.perm), asg.perm};
}

PolychainFit polychain_fit(const TwoLayerNet& a, const TwoLayerNet& b, const Dataset& data, const PolychainConfig& cfg) {
  if (!a.same_shape(b)) throw UsageError("polychain_fit: shapes differ");
  if (!(cfg.t_lo >= 0.0 && cfg.t_lo <= cfg.t_hi && cfg.t_hi <= 1.0)) {
    throw UsageError("polychain_fit: need 0 <= t_lo <= t_hi <= 1");
  }
  if (!(cfg.lr > 0.0)) throw UsageError("polychain_fit: lr must be positive");
  PolychainFit out;
  TwoLayerNet bend = lerp(a, b, 0.5);
  Rng rng = Rng(cfg.seed).substream("polychain");
  out.losses.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    TwoLayerNet theta;
    double factor = 0.0;
    if (t <= 0.5) {
      theta = lerp(a, bend, 2.0 * t);
      factor = 2.0 * t;
    } else {
      theta = lerp(bend, b, 2.0 * t - 1.0);
      factor = 2.0 - 2.0 * t;
    }
    const double loss = loss_sq(theta, data);
    out.losses.push_back(loss);
    if (!std::isfinite(loss) || loss > 1e12) {
      throw NumericError("polychain_fit: diverged at iteration " + std::to_string(it));
    }
    const Gradient g = grad(theta, data);
    auto bw = bend.w.data();
    for (std::size_t k = 0; k < bw.size(); ++k) bw[k] -= cfg.lr * factor * g.w.data()[k];
    for (std::size_t k = 0; k < bend.alpha.size(); ++k) bend.alpha[k] -= cfg.lr * factor * g.alpha[k];
  }
  out.bend = bend;
  out.path = polychain_path(a, bend, b);
  return out;
}

}  // namespace connectikit
