// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/paths.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <thread>

#include "connectikit/error.hpp"

namespace connectikit {

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::Linear: return "linear";
    case SegmentKind::SqrtSwap: return "sqrt_swap";
    case SegmentKind::Merge: return "merge";
    case SegmentKind::Shrink: return "shrink";
    case SegmentKind::HomogeneousRescale: return "homogeneous_rescale";
    case SegmentKind::DeltaAverage: return "delta_average";
    case SegmentKind::DisjointInterp: return "disjoint_interp";
    case SegmentKind::PolychainLeg: return "polychain_leg";
  }
  return "?";
}

SegmentKind parse_segment_kind(std::string_view name) {
  for (auto k : {SegmentKind::Linear, SegmentKind::SqrtSwap, SegmentKind::Merge, SegmentKind::Shrink,
                 SegmentKind::HomogeneousRescale, SegmentKind::DeltaAverage, SegmentKind::DisjointInterp,
                 SegmentKind::PolychainLeg}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown segment kind '" + std::string(name) + "'");
}

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool column_is_zero(const TwoLayerNet& net, std::size_t i) {
  for (std::size_t r = 0; r < net.w.rows(); ++r)
    if (net.w(r, i) != 0.0) return false;
  return true;
}

void check_index(const TwoLayerNet& net, std::size_t i, const char* who) {
  if (i >= net.width()) {
    throw UsageError(std::string(who) + ": neuron index " + std::to_string(i) + " out of range for width " +
                     std::to_string(net.width()));
  }
}

}  // namespace

TwoLayerNet Segment::at(double u_in) const {
  const double u = reversed ? 1.0 - u_in : u_in;
  if (u == 0.0) return base;
  switch (kind) {
    case SegmentKind::Linear:
    case SegmentKind::PolychainLeg:
      if (u == 1.0) return other;
      return lerp(base, other, u);
    case SegmentKind::SqrtSwap: {
      TwoLayerNet out = base;
      const double a = std::sqrt(1.0 - u);
      const double b = std::sqrt(u);
      for (std::size_t r = 0; r < out.w.rows(); ++r) {
        out.w(r, j) = b * base.w(r, i);
        out.w(r, i) = a * base.w(r, i);
      }
      out.alpha[j] = b * base.alpha[i];
      out.alpha[i] = a * base.alpha[i];
      return out;
    }
    case SegmentKind::Merge: {
      TwoLayerNet out = base;
      const double ai = base.alpha[i];
      const double aj = base.alpha[j];
      const double s = std::sqrt(aj * aj + u * ai * ai);
      const double keep = std::sqrt(1.0 - u);
      for (std::size_t r = 0; r < out.w.rows(); ++r) {
        out.w(r, j) = (u * base.w(r, i) * std::abs(ai) + base.w(r, j) * std::abs(aj)) / s;
        out.w(r, i) = keep * base.w(r, i);
      }
      out.alpha[j] = s * sign_of(ai);
      out.alpha[i] = keep * ai;
      return out;
    }
    case SegmentKind::Shrink: {
      TwoLayerNet out = base;
      if (base.alpha[i] == 0.0) {
        for (std::size_t r = 0; r < out.w.rows(); ++r) out.w(r, i) = (1.0 - u) * base.w(r, i);
      } else {
        out.alpha[i] = (1.0 - u) * base.alpha[i];
      }
      return out;
    }
    case SegmentKind::HomogeneousRescale: {
      TwoLayerNet out = base;
      for (std::size_t k = 0; k < out.width(); ++k) {
        const double a0 = base.alpha[k];
        if (a0 == 0.0 || targets[k] == a0) continue;
        const double au = u == 1.0 ? targets[k] : a0 + (targets[k] - a0) * u;
        out.alpha[k] = au;
        const double c = a0 / au;
        for (std::size_t r = 0; r < out.w.rows(); ++r) out.w(r, k) = base.w(r, k) * c;
      }
      return out;
    }
    case SegmentKind::DeltaAverage: {
      TwoLayerNet out = base;
      for (const auto& g : groups) {
        const double k = static_cast<double>(g.size());
        for (std::size_t r = 0; r < out.w.rows(); ++r) {
          double mean = 0.0;
          for (std::size_t c : g) mean += base.w(r, c);
          mean /= k;
          for (std::size_t c : g) out.w(r, c) = u == 1.0 ? mean : (1.0 - u) * base.w(r, c) + u * mean;
        }
      }
      return out;
    }
    case SegmentKind::DisjointInterp: {
      if (u == 1.0) return other;
      TwoLayerNet out = base;
      const double a = std::sqrt(1.0 - u);
      const double b = std::sqrt(u);
      auto ow = out.w.data();
      for (std::size_t k = 0; k < ow.size(); ++k) ow[k] = a * base.w.data()[k] + b * other.w.data()[k];
      for (std::size_t k = 0; k < out.width(); ++k) out.alpha[k] = a * base.alpha[k] + b * other.alpha[k];
      return out;
    }
  }
  throw UsageError("Segment::at: unknown kind");
}

PiecewisePath::PiecewisePath(std::vector<Segment> segments) {
  for (auto& s : segments) append(std::move(s));
}

TwoLayerNet PiecewisePath::at(double t) const {
  if (segments_.empty()) throw UsageError("PiecewisePath: empty path");
  const double tc = std::clamp(t, 0.0, 1.0);
  const double S = static_cast<double>(segments_.size());
  const auto k = std::min(static_cast<std::size_t>(std::floor(tc * S)), segments_.size() - 1);
  const double u = std::clamp(tc * S - static_cast<double>(k), 0.0, 1.0);
  return segments_[k].at(u);
}

TwoLayerNet PiecewisePath::start() const {
  if (segments_.empty()) throw UsageError("PiecewisePath: empty path");
  return segments_.front().start();
}

TwoLayerNet PiecewisePath::end() const {
  if (segments_.empty()) throw UsageError("PiecewisePath: empty path");
  return segments_.back().end();
}

void PiecewisePath::append(Segment s) {
  if (!segments_.empty()) {
    const TwoLayerNet prev = segments_.back().end();
    const TwoLayerNet next = s.start();
    if (!prev.same_shape(next)) throw UsageError("PiecewisePath: segment shape mismatch");
    const double scale = std::max({1.0, norm_inf(prev.w.data()), norm_inf(prev.alpha)});
    const double gap = max_abs_diff(prev, next);
    if (gap > 1e-12 * scale) {
      throw NumericError("PiecewisePath: discontinuity of " + std::to_string(gap) + " between segments");
    }
  }
  segments_.push_back(std::move(s));
}

void PiecewisePath::append(const PiecewisePath& p) {
  for (const auto& s : p.segments()) append(s);
}

PiecewisePath PiecewisePath::reversed() const {
  PiecewisePath out;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    Segment s = *it;
    s.reversed = !s.reversed;
    out.segments_.push_back(std::move(s));
  }
  return out;
}

PiecewisePath PiecewisePath::constant(const TwoLayerNet& net) { return linear_path(net, net); }

PathProfile eval_path(const PiecewisePath& path, const Dataset& data, const RegSetSpec& spec, std::size_t n_samples,
                      std::size_t threads) {
  if (n_samples < 2) throw UsageError("eval_path: need at least 2 samples");
  data.validate();
  PathProfile prof;
  prof.samples.resize(n_samples);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double t = k + 1 == n_samples ? 1.0 : static_cast<double>(k) / static_cast<double>(n_samples - 1);
      const TwoLayerNet net = path.at(t);
      ProfileSample& s = prof.samples[k];
      s.t = t;
      s.loss = loss_sq(net, data);
      const ConstraintValues cv = constraint_values(net, spec.norm);
      s.r_w = cv.w;
      s.r_alpha = cv.alpha;
      s.stable_rank = norm_inf(net.w.data()) == 0.0 ? 0.0 : stable_rank(net.w);
    }
  };
  std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min(workers, n_samples);
  if (workers <= 1) {
    work(0, n_samples);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_samples + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n_samples, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  const double l0 = prof.samples.front().loss;
  const double l1 = prof.samples.back().loss;
  for (const auto& s : prof.samples) {
    prof.barrier = std::max(prof.barrier, s.loss - ((1.0 - s.t) * l0 + s.t * l1));
    prof.max_loss = std::max(prof.max_loss, s.loss);
    prof.max_r_w = std::max(prof.max_r_w, s.r_w);
    prof.max_r_alpha = std::max(prof.max_r_alpha, s.r_alpha);
  }
  return prof;
}

PiecewisePath linear_path(const TwoLayerNet& a, const TwoLayerNet& b) {
  if (!a.same_shape(b)) throw UsageError("linear_path: endpoint shapes differ");
  Segment s;
  s.kind = SegmentKind::Linear;
  s.base = a;
  s.other = b;
  return PiecewisePath({s});
}

PiecewisePath swap_path(const TwoLayerNet& net, std::size_t i, std::size_t j) {
  check_index(net, i, "swap_path");
  check_index(net, j, "swap_path");
  const bool zi = net.neuron_is_zero(i);
  const bool zj = net.neuron_is_zero(j);
  if (i == j || (zi && zj)) return PiecewisePath::constant(net);
  if (!zi && !zj) {
    throw PreconditionError("swap_path: neurons " + std::to_string(i) + " and " + std::to_string(j) +
                            " are both nonzero; route through a zero slot");
  }
  Segment s;
  s.kind = SegmentKind::SqrtSwap;
  s.base = net;
  s.i = zi ? j : i;
  s.j = zi ? i : j;
  return PiecewisePath({s});
}

PiecewisePath move_neuron(const TwoLayerNet& net, std::size_t i, std::size_t j) {
  check_index(net, i, "move_neuron");
  check_index(net, j, "move_neuron");
  if (i == j) return PiecewisePath::constant(net);
  if (net.neuron_is_zero(i) || net.neuron_is_zero(j)) return swap_path(net, i, j);
  std::size_t z = net.width();
  for (std::size_t k = 0; k < net.width(); ++k) {
    if (k != i && k != j && net.neuron_is_zero(k)) {
      z = k;
      break;
    }
  }
  if (z == net.width()) throw PreconditionError("move_neuron: no zero slot available for a three-swap exchange");
  PiecewisePath p = swap_path(net, i, z);
  p.append(swap_path(p.end(), j, i));
  p.append(swap_path(p.end(), z, j));
  return p;
}

PiecewisePath merge_path(const TwoLayerNet& net, std::size_t i, std::size_t j, const Dataset& data) {
  check_index(net, i, "merge_path");
  check_index(net, j, "merge_path");
  if (i == j) throw PreconditionError("merge_path: cannot merge a neuron with itself");
  if (column_is_zero(net, i) || net.alpha[i] == 0.0 || column_is_zero(net, j) || net.alpha[j] == 0.0) {
    throw PreconditionError("merge_path: both neurons must be active (W_k alpha_k != 0)");
  }
  if (sign_of(net.alpha[i]) != sign_of(net.alpha[j])) {
    throw PreconditionError("merge_path: output weights have opposite signs");
  }
  if (activation_pattern(data.x, net.neuron(i)) != activation_pattern(data.x, net.neuron(j))) {
    throw PreconditionError("merge_path: neurons have different activation patterns");
  }
  Segment s;
  s.kind = SegmentKind::Merge;
  s.base = net;
  s.i = i;
  s.j = j;
  return PiecewisePath({s});
}

PiecewisePath shrink_path(const TwoLayerNet& net, std::size_t i) {
  check_index(net, i, "shrink_path");
  const bool wz = column_is_zero(net, i);
  const bool az = net.alpha[i] == 0.0;
  if (!wz && !az) throw PreconditionError("shrink_path: neuron " + std::to_string(i) + " is active");
  if (wz && az) return PiecewisePath::constant(net);
  Segment s;
  s.kind = SegmentKind::Shrink;
  s.base = net;
  s.i = i;
  return PiecewisePath({s});
}

PiecewisePath homogeneous_rescale_path(const TwoLayerNet& net, const Vec& targets) {
  if (targets.size() != net.width()) throw UsageError("homogeneous_rescale_path: target length mismatch");
  for (std::size_t k = 0; k < net.width(); ++k) {
    const double a = net.alpha[k];
    if (a == 0.0 ? targets[k] != 0.0 : !(targets[k] * a > 0.0)) {
      throw PreconditionError("homogeneous_rescale_path: target " + std::to_string(k) +
                              " must be nonzero with the sign of the current output weight");
    }
  }
  Segment s;
  s.kind = SegmentKind::HomogeneousRescale;
  s.base = net;
  s.targets = targets;
  return PiecewisePath({s});
}

PiecewisePath disjoint_interp_path(const TwoLayerNet& a, const TwoLayerNet& b) {
  if (!a.same_shape(b)) throw UsageError("disjoint_interp_path: endpoint shapes differ");
  for (std::size_t k = 0; k < a.width(); ++k) {
    if (!a.neuron_is_zero(k) && !b.neuron_is_zero(k)) {
      throw PreconditionError("disjoint_interp_path: slot " + std::to_string(k) + " is used by both endpoints");
    }
  }
  Segment s;
  s.kind = SegmentKind::DisjointInterp;
  s.base = a;
  s.other = b;
  return PiecewisePath({s});
}

namespace {

// Appends shrink segments for every neuron with exactly one zero half.
void shrink_dead(PiecewisePath& path, TwoLayerNet& cur) {
  for (std::size_t k = 0; k < cur.width(); ++k) {
    const bool wz = column_is_zero(cur, k);
    const bool az = cur.alpha[k] == 0.0;
    if (wz != az) {
      path.append(shrink_path(cur, k));
      cur = path.end();
    }
  }
}

}  // namespace

PiecewisePath equalize_path(const TwoLayerNet& net, const Dataset& data, const RegSetSpec& spec, double tol) {
  if (spec.norm != NormKind::MaxEntry) throw UsageError("equalize_path: only defined for the max norm");
  if (!in_reg_set(net, data, spec, tol)) {
    throw PreconditionError("equalize_path: input is not in the regularized solution set");
  }
  PiecewisePath path;
  TwoLayerNet cur = net;
  path.append(PiecewisePath::constant(cur));
  shrink_dead(path, cur);

  Vec targets(cur.width(), 0.0);
  bool rescale = false;
  for (std::size_t k = 0; k < cur.width(); ++k) {
    if (cur.alpha[k] == 0.0) continue;
    targets[k] = sign_of(cur.alpha[k]) * spec.radius();
    rescale = rescale || targets[k] != cur.alpha[k];
  }
  if (rescale) {
    path.append(homogeneous_rescale_path(cur, targets));
    cur = path.end();
  }

  std::map<std::pair<Pattern, int>, std::vector<std::size_t>> by_key;
  for (std::size_t k = 0; k < cur.width(); ++k) {
    if (cur.alpha[k] == 0.0) continue;
    by_key[{activation_pattern(data.x, cur.neuron(k)), cur.alpha[k] > 0 ? 1 : -1}].push_back(k);
  }
  Segment avg;
  avg.kind = SegmentKind::DeltaAverage;
  avg.base = cur;
  for (auto& [key, g] : by_key) {
    if (g.size() < 2) continue;
    bool identical = true;
    for (std::size_t c = 1; c < g.size() && identical; ++c)
      for (std::size_t r = 0; r < cur.w.rows(); ++r)
        if (cur.w(r, g[c]) != cur.w(r, g[0])) identical = false;
    if (!identical) avg.groups.push_back(g);
  }
  if (!avg.groups.empty()) {
    path.append(avg);
    cur = path.end();
  }
  if (path.size() > 1) {
    // Drop the leading constant piece once real work exists.
    std::vector<Segment> segs(path.segments().begin() + 1, path.segments().end());
    return PiecewisePath(std::move(segs));
  }
  return path;
}

PiecewisePath polychain_path(const TwoLayerNet& a, const TwoLayerNet& bend, const TwoLayerNet& b) {
  if (!a.same_shape(bend) || !a.same_shape(b)) throw UsageError("polychain_path: shape mismatch");
  Segment s1;
  s1.kind = SegmentKind::PolychainLeg;
  s1.base = a;
  s1.other = bend;
  Segment s2;
  s2.kind = SegmentKind::PolychainLeg;
  s2.base = bend;
  s2.other = b;
  return PiecewisePath({s1, s2});
}

}  // namespace connectikit
