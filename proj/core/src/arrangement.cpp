// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/arrangement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "connectikit/error.hpp"
#include "connectikit/rng.hpp"

namespace connectikit {

std::optional<std::size_t> PatternSet::index_of(const Pattern& p) const {
  const auto it = std::lower_bound(patterns.begin(), patterns.end(), p);
  if (it == patterns.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - patterns.begin());
}

namespace {

constexpr double kZeroRel = 1e-12;

// Pattern of h with near-zero inner products (relative to |x_j||h|) counted as active.
Pattern tolerant_pattern(const Mat& x, std::span<const double> h) {
  const double hn = norm2(h);
  Pattern p(x.rows());
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const double z = dot(x.row(j), h);
    p[j] = (z >= 0.0 || std::abs(z) <= kZeroRel * norm2(x.row(j)) * hn) ? 1 : 0;
  }
  return p;
}

// Collects patterns keyed by bit vector, remembering the first witness.
class PatternCollector {
 public:
  explicit PatternCollector(const Mat& x) : x_(x) {}
  bool add(std::span<const double> h) { return add(tolerant_pattern(x_, h), Vec(h.begin(), h.end())); }
  bool add(Pattern p, Vec h) { return found_.emplace(std::move(p), std::move(h)).second; }
  bool contains(const Pattern& p) const { return found_.count(p) > 0; }
  const std::map<Pattern, Vec>& found() const { return found_; }

 private:
  const Mat& x_;
  std::map<Pattern, Vec> found_;
};

// Orthonormal basis (d x k) of the null space of the rows of `a`.
Mat null_space(const Mat& a, std::size_t d) {
  Mat gram(d, d);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) gram(i, j) += ar[i] * ar[j];
  }
  const SvdResult s = svd(gram);
  const double cutoff = 1e-10 * std::max(1.0, s.sigma.front());
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < d; ++k)
    if (s.sigma[k] <= cutoff) keep.push_back(k);
  Mat q(d, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c)
    for (std::size_t i = 0; i < d; ++i) q(i, c) = s.u(i, keep[c]);
  return q;
}

// Exact enumeration of all faces inside span(q) for a flat of dimension 1 or 2.
void enumerate_flat(const Mat& x, const Mat& q, PatternCollector& out) {
  const std::size_t d = q.rows();
  const std::size_t k = q.cols();
  auto lift = [&](std::span<const double> g) {
    Vec h(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c < k; ++c) h[i] += q(i, c) * g[c];
    return h;
  };
  if (k == 1) {
    out.add(lift(Vec{1.0}));
    out.add(lift(Vec{-1.0}));
    return;
  }
  if (k != 2) return;
  std::vector<double> angles;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    double r0 = 0.0, r1 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      r0 += q(i, 0) * x(j, i);
      r1 += q(i, 1) * x(j, i);
    }
    if (std::hypot(r0, r1) <= kZeroRel * norm2(x.row(j))) continue;
    const double a = std::atan2(r0, -r1);  // direction (-r1, r0) is orthogonal to (r0, r1)
    for (double t : {a, a + std::numbers::pi}) {
      double w = std::fmod(t, 2.0 * std::numbers::pi);
      if (w < 0) w += 2.0 * std::numbers::pi;
      angles.push_back(w);
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<double> uniq;
  for (double a : angles)
    if (uniq.empty() || a - uniq.back() > 1e-12) uniq.push_back(a);
  if (uniq.size() > 1 && uniq.front() + 2.0 * std::numbers::pi - uniq.back() <= 1e-12) uniq.pop_back();
  if (uniq.empty()) {
    out.add(lift(Vec{1.0, 0.0}));
    return;
  }
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    const double a = uniq[i];
    const double next = i + 1 < uniq.size() ? uniq[i + 1] : uniq.front() + 2.0 * std::numbers::pi;
    const double mid = 0.5 * (a + next);
    out.add(lift(Vec{std::cos(a), std::sin(a)}));
    out.add(lift(Vec{std::cos(mid), std::sin(mid)}));
  }
}

// Rows grouped by the hyperplane they define; orientation is +1 or -1 relative to the
// class representative.
struct HyperplaneClass {
  std::vector<std::size_t> rows;
  std::vector<int> orientation;
  Vec normal;
};

std::vector<HyperplaneClass> hyperplane_classes(const Mat& x) {
  std::vector<HyperplaneClass> classes;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const double n = norm2(x.row(j));
    if (n == 0.0) continue;
    Vec u(x.row(j).begin(), x.row(j).end());
    for (double& v : u) v /= n;
    bool placed = false;
    for (auto& c : classes) {
      const double dp = dot(u, c.normal);
      if (std::abs(std::abs(dp) - 1.0) <= 1e-12) {
        c.rows.push_back(j);
        c.orientation.push_back(dp > 0 ? 1 : -1);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({{j}, {1}, u});
  }
  return classes;
}

}  // namespace

std::optional<Vec> realize_pattern(const Mat& x, const Pattern& p, double eps) {
  const std::size_t d = x.cols();
  if (p.size() != x.rows()) throw UsageError("realize_pattern: pattern length mismatch");
  std::size_t n_on = 0;
  for (auto b : p) n_on += b;
  Mat ge(n_on, d), strict(x.rows() - n_on, d);
  std::size_t a = 0, b = 0;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    if (p[j]) {
      for (std::size_t i = 0; i < d; ++i) ge(a, i) = x(j, i);
      ++a;
    } else {
      for (std::size_t i = 0; i < d; ++i) strict(b, i) = -x(j, i);
      ++b;
    }
  }
  const std::vector<Interval> bounds(d);
  const LpResult r = lp_feasible(Mat(0, d), {}, bounds, strict, eps, ge);
  if (!r.feasible) return std::nullopt;
  return r.witness;
}

PatternSet enum_patterns(const Mat& x, std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n == 0) throw UsageError("enum_patterns: empty dataset");
  if (d == 0) throw UsageError("enum_patterns: zero input dimension");
  if (d > 4) throw UsageError("enum_patterns: input dimension " + std::to_string(d) + " exceeds the supported maximum 4");

  PatternCollector col(x);
  col.add(Vec(d, 0.0));
  if (d == 1) {
    col.add(Vec{1.0});
    col.add(Vec{-1.0});
  } else if (d == 2) {
    enumerate_flat(x, Mat::identity(2), col);
  } else {
    const auto classes = hyperplane_classes(x);
    // Faces of dimension 1 and 2 live in flats cut out by pairs of hyperplanes (for d = 3 the
    // pair intersections are lines; for d = 4 they are planes, enumerated exactly in 2-D).
    for (std::size_t a = 0; a < classes.size(); ++a) {
      for (std::size_t b = a + 1; b < classes.size(); ++b) {
        Mat pair(2, d);
        for (std::size_t i = 0; i < d; ++i) {
          pair(0, i) = classes[a].normal[i];
          pair(1, i) = classes[b].normal[i];
        }
        const Mat q = null_space(pair, d);
        if (q.cols() == d - 2) enumerate_flat(x, q, col);
      }
    }
    Rng rng = Rng(seed).substream("enum_patterns");
    const std::size_t samples = 500 * d * d;
    for (std::size_t s = 0; s < samples; ++s) {
      Vec h(d);
      for (double& v : h) v = rng.normal();
      col.add(h);
    }
    // Closure: move each hyperplane class of each known pattern to its other states (positive
    // side, negative side, on the hyperplane) and keep the realizable results. Cells are
    // connected through facets, and facets are one class away from a cell, so this
    // reaches every cell and facet from any sampled cell.
    std::set<Pattern> rejected;
    std::deque<Pattern> queue;
    for (const auto& [p, h] : col.found()) queue.push_back(p);
    while (!queue.empty()) {
      const Pattern p = queue.front();
      queue.pop_front();
      for (const auto& c : classes) {
        for (int state = 0; state < 3; ++state) {
          Pattern cand = p;
          for (std::size_t r = 0; r < c.rows.size(); ++r) {
            const int o = c.orientation[r];
            if (state == 0) cand[c.rows[r]] = o > 0 ? 1 : 0;
            if (state == 1) cand[c.rows[r]] = o > 0 ? 0 : 1;
            if (state == 2) cand[c.rows[r]] = 1;
          }
          if (cand == p || col.contains(cand) || rejected.count(cand)) continue;
          if (auto h = realize_pattern(x, cand)) {
            col.add(cand, std::move(*h));
            queue.push_back(cand);
          } else {
            rejected.insert(cand);
          }
        }
      }
    }
  }

  PatternSet out;
  out.exact = d <= 2;
  for (const auto& [p, h] : col.found()) {
    out.patterns.push_back(p);
    out.witnesses.push_back(h);
  }
  return out;
}

PatternSet enum_patterns(const Dataset& data, std::uint64_t seed) {
  data.validate();
  return enum_patterns(data.x, seed);
}

std::size_t SupportVector::mass() const {
  std::size_t m = 0;
  for (auto v : t) m += v;
  for (auto v : s) m += v;
  return m;
}

bool SupportVector::leq(const SupportVector& o) const {
  if (t.size() != o.t.size() || s.size() != o.s.size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > o.t[i] || s[i] > o.s[i]) return false;
  return true;
}

std::string SupportVector::to_string() const {
  std::ostringstream os;
  os << "t=(";
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ") s=(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

double pattern_eps(const Dataset& data) {
  const double scale = norm_inf(data.y);
  return 1e-6 * (scale > 0.0 ? scale : 1.0);
}

PtsResult pts_feasible_active(const PatternSet& patterns, const Dataset& data, const SupportVector& ts,
                              double lambda, const std::vector<bool>& active) {
  data.validate();
  if (!(lambda > 0.0)) throw UsageError("pts_feasible: lambda must be positive");
  const std::size_t P = patterns.count();
  const std::size_t n = data.n();
  const std::size_t d = data.d();
  if (ts.t.size() != P || ts.s.size() != P || active.size() != 2 * P) {
    throw UsageError("pts_feasible: support vector length does not match the pattern count");
  }
  const std::size_t nvars = 2 * P * d;
  const double inv_l2 = 1.0 / (lambda * lambda);

  std::vector<Interval> bounds(nvars, Interval{0.0, 0.0});
  std::size_t n_ge = 0, n_strict = 0;
  for (std::size_t b = 0; b < 2 * P; ++b) {
    const std::size_t count = b < P ? ts.t[b] : ts.s[b - P];
    if (!active[b]) continue;
    if (count == 0) throw UsageError("pts_feasible: active block with zero count");
    const double r = static_cast<double>(count) * inv_l2;
    for (std::size_t k = 0; k < d; ++k) bounds[b * d + k] = Interval{-r, r};
    for (std::size_t j = 0; j < n; ++j) (patterns.patterns[b % P][j] ? n_ge : n_strict) += 1;
  }

  Mat eq(n, nvars);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < P; ++i) {
      if (!patterns.patterns[i][j]) continue;
      for (std::size_t k = 0; k < d; ++k) {
        eq(j, i * d + k) = data.x(j, k);
        eq(j, (P + i) * d + k) = -data.x(j, k);
      }
    }
  }
  Mat ge(n_ge, nvars), strict(n_strict, nvars);
  std::size_t gi = 0, si = 0;
  for (std::size_t b = 0; b < 2 * P; ++b) {
    if (!active[b]) continue;
    const Pattern& p = patterns.patterns[b % P];
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        if (p[j]) ge(gi, b * d + k) = data.x(j, k);
        else strict(si, b * d + k) = -data.x(j, k);
      }
      (p[j] ? gi : si) += 1;
    }
  }
  const LpResult r = lp_feasible(eq, data.y, bounds, strict, pattern_eps(data), ge);
  PtsResult out;
  out.feasible = r.feasible;
  if (r.feasible) {
    out.witness.u.assign(P, Vec(d, 0.0));
    out.witness.v.assign(P, Vec(d, 0.0));
    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        out.witness.u[i][k] = r.witness[i * d + k];
        out.witness.v[i][k] = r.witness[(P + i) * d + k];
      }
    }
  }
  return out;
}

PtsResult pts_feasible(const PatternSet& patterns, const Dataset& data, const SupportVector& ts, double lambda) {
  const std::size_t P = patterns.count();
  if (ts.t.size() != P || ts.s.size() != P) {
    throw UsageError("pts_feasible: support vector length does not match the pattern count");
  }
  std::vector<std::size_t> blocks;
  for (std::size_t b = 0; b < 2 * P; ++b)
    if ((b < P ? ts.t[b] : ts.s[b - P]) > 0) blocks.push_back(b);
  if (blocks.size() > 20) throw UsageError("pts_feasible: support too large for subset enumeration");
  // Try larger active sets first; the empty set covers y = 0.
  std::vector<std::uint32_t> masks(std::size_t{1} << blocks.size());
  for (std::uint32_t k = 0; k < masks.size(); ++k) masks[k] = k;
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) > std::popcount(b);
  });
  for (std::uint32_t mask : masks) {
    std::vector<bool> active(2 * P, false);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      if (mask & (1u << k)) active[blocks[k]] = true;
    PtsResult r = pts_feasible_active(patterns, data, ts, lambda, active);
    if (r.feasible) return r;
  }
  return {};
}

MinimalSupports minimal_supports(const PatternSet& patterns, const Dataset& data, double lambda, std::size_t cap) {
  if (cap < 1) throw UsageError("minimal_supports: cap must be at least 1");
  const std::size_t P = patterns.count();
  const std::size_t dims = 2 * P;
  const double lattice = std::pow(static_cast<double>(cap + 1), static_cast<double>(dims));
  if (lattice > 5e7) {
    throw UsageError("minimal_supports: lattice [0," + std::to_string(cap) + "]^" + std::to_string(dims) +
                     " is too large to explore");
  }
  MinimalSupports out;
  std::vector<std::size_t> point(dims, 0);
  auto as_support = [&](const std::vector<std::size_t>& p) {
    SupportVector sv;
    sv.t.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(P));
    sv.s.assign(p.begin() + static_cast<std::ptrdiff_t>(P), p.end());
    return sv;
  };
  auto visit = [&](const std::vector<std::size_t>& p) {
    const SupportVector sv = as_support(p);
    for (const auto& m : out.supports)
      if (m.leq(sv)) return;
    std::vector<bool> active(dims, false);
    for (std::size_t b = 0; b < dims; ++b) active[b] = p[b] > 0;
    ++out.lp_calls;
    if (pts_feasible_active(patterns, data, sv, lambda, active).feasible) out.supports.push_back(sv);
  };
  // Depth-first generation of all points with a given mass, in lexicographic order.
  auto gen = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == dims) {
      if (remaining <= cap) {
        point[pos] = remaining;
        visit(point);
      }
      return;
    }
    const std::size_t hi = std::min(cap, remaining);
    for (std::size_t v = 0; v <= hi; ++v) {
      if (remaining - v > cap * (dims - pos - 1)) continue;
      point[pos] = v;
      self(self, pos + 1, remaining - v);
    }
    point[pos] = 0;
  };
  for (std::size_t level = 0; level <= cap * dims; ++level) gen(gen, 0, level);

  for (const auto& m : out.supports) {
    for (std::size_t i = 0; i < P; ++i)
      if (m.t[i] == cap || m.s[i] == cap) out.truncated = true;
  }
  return out;
}

std::size_t critical_width(const std::vector<SupportVector>& z_a) {
  if (z_a.empty()) throw UsageError("critical_width: empty support list");
  std::size_t best = 0;
  for (const auto& sv : z_a) best = std::max(best, sv.mass());
  return 2 * best;
}

TwoLayerNet equalized_from_witness(const SupportVector& ts, const PtsWitness& witness, double lambda,
                                   std::size_t width) {
  const std::size_t P = ts.t.size();
  if (witness.u.size() != P || witness.v.size() != P) throw UsageError("equalized_from_witness: size mismatch");
  if (ts.mass() > width) {
    throw PreconditionError("equalized_from_witness: support mass " + std::to_string(ts.mass()) +
                            " exceeds width " + std::to_string(width));
  }
  const std::size_t d = P > 0 ? witness.u.front().size() : 0;
  TwoLayerNet net = TwoLayerNet::zeros(d, width);
  std::size_t slot = 0;
  auto place = [&](const Vec& block, std::size_t count, double sign) {
    for (std::size_t c = 0; c < count; ++c, ++slot) {
      for (std::size_t k = 0; k < d; ++k) net.w(k, slot) = block[k] * lambda / static_cast<double>(count);
      net.alpha[slot] = sign / lambda;
    }
  };
  for (std::size_t i = 0; i < P; ++i) place(witness.u[i], ts.t[i], 1.0);
  for (std::size_t i = 0; i < P; ++i) place(witness.v[i], ts.s[i], -1.0);
  return net;
}

RegimeReport regime_check(const PatternSet& patterns, std::size_t m, double lambda, NormKind norm, std::size_t m0,
                          double lambda_fit, std::optional<std::size_t> m_star, std::optional<double> big_m) {
  if (!(lambda > 0.0)) throw UsageError("regime_check: lambda must be positive");
  RegimeReport r;
  const std::size_t P = patterns.count();
  const std::size_t four_p = 4 * P;
  r.nonempty = lambda <= lambda_fit && m >= m0;
  r.reasons.push_back(std::string("nonempty: ") + (r.nonempty ? "yes" : "not guaranteed") + " (lambda " +
                      std::to_string(lambda) + (lambda <= lambda_fit ? " <= " : " > ") + "lambda_fit " +
                      std::to_string(lambda_fit) + ", m " + std::to_string(m) + (m >= m0 ? " >= " : " < ") +
                      "m0 " + std::to_string(m0) + ")");
  if (norm == NormKind::Frobenius || norm == NormKind::Operator) {
    if (m >= four_p) {
      r.connectivity = Guarantee::Holds;
      r.reasons.push_back("connected: m = " + std::to_string(m) + " >= 4P = " + std::to_string(four_p));
    } else {
      r.reasons.push_back("connectivity unknown: m = " + std::to_string(m) + " < 4P = " + std::to_string(four_p));
    }
  } else if (norm == NormKind::MaxEntry) {
    if (!m_star && !big_m) r.warnings.push_back("missing M: supply m* or M for max-norm connectivity");
    if (m_star && m >= *m_star) {
      r.connectivity = Guarantee::Holds;
      r.reasons.push_back("connected: m = " + std::to_string(m) + " >= m* = " + std::to_string(*m_star));
    }
    if (big_m) {
      if (!(*big_m > 0.0)) throw UsageError("regime_check: M must be positive");
      if (m >= four_p + 1) {
        r.lambda_c = std::sqrt((1.0 / *big_m) * (static_cast<double>(m) / static_cast<double>(four_p) - 1.0));
        if (lambda <= *r.lambda_c) {
          r.connectivity = Guarantee::Holds;
          r.reasons.push_back("connected: lambda <= lambda_c = " + std::to_string(*r.lambda_c));
        } else {
          r.reasons.push_back("lambda > lambda_c = " + std::to_string(*r.lambda_c));
        }
      } else {
        r.reasons.push_back("lambda_c undefined: m < 4P + 1");
      }
    }
    if (r.connectivity == Guarantee::Unknown) r.reasons.push_back("connectivity unknown for the max norm");
  } else {
    throw UsageError("regime_check: norm must be maxentry, frobenius or operator");
  }
  if (!r.nonempty) r.connectivity = Guarantee::Unknown;
  return r;
}

}  // namespace connectikit
