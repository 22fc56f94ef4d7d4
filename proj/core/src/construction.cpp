// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "connectikit/error.hpp"

namespace connectikit {

Vec Construction::h1() const { return Vec(d, 1.0); }

Vec Construction::h2() const {
  Vec h(d, -1.0);
  h[0] = 1.0;
  return h;
}

Construction build_construction(std::size_t d, double L) {
  if (d < 2) throw UsageError("build_construction: need d >= 2");
  if (!(L > 1.0) || !(L < std::sqrt(static_cast<double>(d)))) {
    throw UsageError("build_construction: need 1 < L < sqrt(d), got L = " + std::to_string(L));
  }
  const double dm1 = static_cast<double>(d - 1);
  Construction c;
  c.d = d;
  c.L = L;
  c.b = Mat(d, d);
  c.b(0, 0) = (1.0 + L) / 2.0;
  for (std::size_t j = 1; j < d; ++j) c.b(0, j) = (1.0 - L) / (2.0 * dm1);
  for (std::size_t i = 1; i < d; ++i) {
    c.b(i, 0) = 0.5;
    for (std::size_t j = 1; j < d; ++j) c.b(i, j) = i == j ? 1.0 - 1.0 / (2.0 * dm1) : -1.0 / (2.0 * dm1);
  }
  c.a = invert(c.b);
  Mat x(2 * d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x(i, j) = c.a(i, j);
      x(i + d, j) = -c.a(i, j);
    }
  }
  c.data = Dataset{std::move(x), Vec(2 * d, 1.0)};
  return c;
}

namespace {

void check_sigma(const Construction& c, const Sigma& sigma) {
  if (sigma.size() != c.d) throw UsageError("sigma length must equal d = " + std::to_string(c.d));
  for (int s : sigma)
    if (s != 1 && s != -1) throw UsageError("sigma entries must be +1 or -1");
}

// y_sigma for the given sign vector: y_i where sigma_i = +1, otherwise -y_{i+d}.
Vec y_signed(const Construction& c, const Sigma& sigma) {
  Vec ys(c.d);
  for (std::size_t i = 0; i < c.d; ++i) ys[i] = sigma[i] > 0 ? c.data.y[i] : -c.data.y[i + c.d];
  return ys;
}

Sigma negate(const Sigma& s) {
  Sigma out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = -s[i];
  return out;
}

Vec b_times_sigma(const Mat& b, const Sigma& sigma) {
  Vec out(b.rows(), 0.0);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out[i] += b(i, j) * sigma[j];
  return out;
}

Mat two_columns(const Vec& p, const Vec& q, double a1, double a2) {
  Mat w(p.size(), 2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    w(i, 0) = p[i] / a1;
    w(i, 1) = q[i] / a2;
  }
  return w;
}

struct BruteMin {
  double value = std::numeric_limits<double>::infinity();
  double a1 = 0.0;
  double a2 = 0.0;
};

// Log-grid search for min over (a1, a2) > 0 of max{||[p/a1, q/a2]||, ||(a1, a2)||_vec}, zooming
// into the neighbourhood of the best cell.
BruteMin brute_minimize(const Vec& p, const Vec& q, NormKind norm, std::size_t grid) {
  if (grid < 2) throw UsageError("brute force grid needs at least 2 points per axis");
  const double scale = std::sqrt(std::max({norm_inf(p), norm_inf(q), 1e-300}));
  double lo1 = std::log(scale) - std::log(1e3), hi1 = std::log(scale) + std::log(1e3);
  double lo2 = lo1, hi2 = hi1;
  BruteMin best;
  for (int round = 0; round < 12; ++round) {
    const double h1 = (hi1 - lo1) / static_cast<double>(grid - 1);
    const double h2 = (hi2 - lo2) / static_cast<double>(grid - 1);
    for (std::size_t i = 0; i < grid; ++i) {
      const double a1 = std::exp(lo1 + h1 * static_cast<double>(i));
      for (std::size_t j = 0; j < grid; ++j) {
        const double a2 = std::exp(lo2 + h2 * static_cast<double>(j));
        const double rw = matrix_norm(two_columns(p, q, a1, a2), norm);
        const Vec av{a1, a2};
        const double v = std::max(rw, vector_norm(av, norm));
        if (v < best.value) best = {v, a1, a2};
      }
    }
    const double c1 = std::log(best.a1), c2 = std::log(best.a2);
    lo1 = c1 - 2.0 * h1;
    hi1 = c1 + 2.0 * h1;
    lo2 = c2 - 2.0 * h2;
    hi2 = c2 + 2.0 * h2;
  }
  return best;
}

bool all_ones(const Vec& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return v == 1.0; });
}

}  // namespace

TwoLayerNet component_point(const Construction& c, const Sigma& sigma, double alpha1, double alpha2) {
  check_sigma(c, sigma);
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw UsageError("component_point: alpha1 and alpha2 must be positive");
  const Vec p = matvec(c.b, y_signed(c, sigma));
  const Vec q = matvec(c.b, y_signed(c, negate(sigma)));
  return TwoLayerNet(two_columns(p, q, alpha1, alpha2), Vec{alpha1, alpha2});
}

Sigma component_of(const Construction& c, const TwoLayerNet& net, double tol) {
  if (net.width() != 2 || net.input_dim() != c.d) {
    throw UsageError("component_of: expected a width-2 net on R^" + std::to_string(c.d));
  }
  if (!in_solution_set(net, c.data, tol)) {
    throw PreconditionError("component_of: net does not interpolate the construction data");
  }
  const Vec z = matvec(c.a, net.neuron(0));
  Sigma sigma(c.d);
  for (std::size_t i = 0; i < c.d; ++i) {
    if (std::abs(z[i]) <= tol) {
      throw PreconditionError("component_of: coordinate " + std::to_string(i) + " of A W_1 is within tol of zero");
    }
    sigma[i] = z[i] > 0.0 ? 1 : -1;
  }
  return sigma;
}

bool same_component_class(const Sigma& s1, const Sigma& s2) { return s1 == s2 || s1 == negate(s2); }

ComponentNorms component_norms(const Construction& c, const Sigma& sigma) {
  check_sigma(c, sigma);
  const Vec bs = b_times_sigma(c.b, sigma);
  return {std::sqrt(norm_inf(bs)), std::sqrt(2.0 * norm2(bs))};
}

ComponentNorms cpq_norms_brute(const Vec& p, const Vec& q, std::size_t grid) {
  if (p.size() != q.size() || p.empty()) throw UsageError("cpq_norms_brute: p and q must have equal nonzero length");
  return {brute_minimize(p, q, NormKind::MaxEntry, grid).value, brute_minimize(p, q, NormKind::Operator, grid).value};
}

double cpq_op_closed_form(const Vec& p, const Vec& q) {
  const double pp = dot(p, p), qq = dot(q, q), pq = dot(p, q);
  return std::pow(pp + qq + 2.0 * std::abs(pq), 0.25);
}

ComponentNorms component_norms_brute(const Construction& c, const Sigma& sigma, std::size_t grid) {
  check_sigma(c, sigma);
  const Vec p = matvec(c.b, y_signed(c, sigma));
  const Vec q = matvec(c.b, y_signed(c, negate(sigma)));
  return cpq_norms_brute(p, q, grid);
}

TwoLayerNet balanced_component_point(const Construction& c, const Sigma& sigma, NormKind norm) {
  check_sigma(c, sigma);
  if (norm != NormKind::MaxEntry && norm != NormKind::Operator) {
    throw UsageError("balanced_component_point: norm must be maxentry or operator");
  }
  const Vec p = matvec(c.b, y_signed(c, sigma));
  const Vec q = matvec(c.b, y_signed(c, negate(sigma)));
  if (norm == NormKind::MaxEntry) {
    return component_point(c, sigma, std::sqrt(norm_inf(p)), std::sqrt(norm_inf(q)));
  }
  if (all_ones(c.data.y)) {
    const double a = std::sqrt(norm2(p));
    return component_point(c, sigma, a, a);
  }
  const BruteMin m = brute_minimize(p, q, norm, 64);
  return component_point(c, sigma, m.a1, m.a2);
}

Sigma sigma_from_id(std::uint64_t id, std::size_t d) {
  if (d > 63) throw UsageError("sigma_from_id: d too large");
  Sigma s(d);
  for (std::size_t k = 0; k < d; ++k) s[k] = (id >> k) & 1U ? -1 : 1;
  return s;
}

namespace {

constexpr std::size_t kMaxLadderDim = 22;

struct LadderValues {
  std::vector<double> r_inf;
  std::vector<double> r_op;
};

// Values for every sigma with sigma_1 = +1; entry k corresponds to sigma_id 2k.
LadderValues ladder_values(const Construction& c, std::size_t threads) {
  if (c.d > kMaxLadderDim) {
    throw UsageError("norm_ladder: exhaustive enumeration supports d <= " + std::to_string(kMaxLadderDim));
  }
  const std::size_t count = std::size_t{1} << (c.d - 1);
  LadderValues v{std::vector<double>(count), std::vector<double>(count)};
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const ComponentNorms n = component_norms(c, sigma_from_id(static_cast<std::uint64_t>(k) << 1U, c.d));
      v.r_inf[k] = n.r_inf;
      v.r_op[k] = n.r_op;
    }
  };
  std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min(workers, count);
  if (workers <= 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk, e = std::min(count, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return v;
}

void rank_values(const std::vector<double>& vals, std::size_t d, double& first, double& second,
                 std::vector<Sigma>& argmin, std::vector<Sigma>& runner_up) {
  first = *std::min_element(vals.begin(), vals.end());
  const double tie1 = first * (1.0 + 1e-12);
  second = std::numeric_limits<double>::infinity();
  for (double v : vals)
    if (v > tie1) second = std::min(second, v);
  const double tie2 = second * (1.0 + 1e-12);
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const Sigma s = sigma_from_id(static_cast<std::uint64_t>(k) << 1U, d);
    if (vals[k] <= tie1) {
      argmin.push_back(s);
      argmin.push_back(negate(s));
    } else if (vals[k] <= tie2) {
      runner_up.push_back(s);
      runner_up.push_back(negate(s));
    }
  }
}

}  // namespace

NormLadder norm_ladder(const Construction& c, std::size_t threads) {
  const LadderValues v = ladder_values(c, threads);
  NormLadder out;
  rank_values(v.r_inf, c.d, out.r_inf_1, out.r_inf_2, out.argmin_inf, out.runner_up_inf);
  rank_values(v.r_op, c.d, out.r_op_1, out.r_op_2, out.argmin_op, out.runner_up_op);
  return out;
}

std::vector<LadderRow> ladder_table(const Construction& c) {
  const LadderValues v = ladder_values(c, 1);
  std::vector<LadderRow> rows(v.r_inf.size());
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = {static_cast<std::uint64_t>(k) << 1U, v.r_inf[k], v.r_op[k]};
  return rows;
}

double predicted_r_inf_2(std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::sqrt(1.0 + (std::sqrt(dd) / 2.0 - 1.0) / (dd - 1.0));
}

double predicted_r_inf_2_general(std::size_t d, double L) {
  return std::sqrt(1.0 + std::max(L - 1.0, 1.0) / (static_cast<double>(d) - 1.0));
}

double predicted_r_op_2(std::size_t d, double L) {
  const double dm1 = static_cast<double>(d) - 1.0;
  const double a = L - (L - 1.0) / dm1;
  return std::sqrt(2.0) * std::pow(std::min(static_cast<double>(d), a * a + 4.0 - 3.0 / dm1), 0.25);
}

LambdaWindows lambda_windows(const NormLadder& ladder) {
  if (!(ladder.r_inf_1 < ladder.r_inf_2) || !(ladder.r_op_1 < ladder.r_op_2)) {
    throw UsageError("lambda_windows: degenerate ladder (best and runner-up values coincide)");
  }
  return {{ladder.r_inf_1, ladder.r_inf_2}, {ladder.r_op_1, ladder.r_op_2}};
}

BarrierWitness barrier_witness(const Construction& c, const PiecewisePath& path, double bisect_tol,
                               std::size_t samples) {
  if (samples < 2) throw UsageError("barrier_witness: need at least 2 samples");
  if (!(bisect_tol > 0.0)) throw UsageError("barrier_witness: bisect_tol must be positive");
  const Sigma s0 = component_of(c, path.start());
  const Sigma s1 = component_of(c, path.end());
  if (same_component_class(s0, s1)) {
    throw PreconditionError("barrier_witness: endpoints lie in the same component class");
  }
  auto z_at = [&](double t) { return matvec(c.a, path.at(t).neuron(0)); };
  auto t_of = [&](std::size_t k) {
    return k + 1 == samples ? 1.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
  };
  Vec z_prev = z_at(0.0);
  for (std::size_t k = 1; k < samples; ++k) {
    const double t_prev = t_of(k - 1), t_cur = t_of(k);
    const Vec z_cur = z_at(t_cur);
    BarrierWitness best;
    best.t_star = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.d; ++i) {
      if (std::signbit(z_prev[i]) == std::signbit(z_cur[i]) && z_prev[i] != 0.0 && z_cur[i] != 0.0) continue;
      double lo = t_prev, hi = t_cur;
      double zlo = z_prev[i], zhi = z_cur[i];
      while (hi - lo > bisect_tol && zlo != 0.0) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double zm = z_at(mid)[i];
        if (zm == 0.0 || std::signbit(zm) != std::signbit(zlo)) {
          hi = mid;
          zhi = zm;
        } else {
          lo = mid;
          zlo = zm;
        }
      }
      const double t = std::abs(zlo) <= std::abs(zhi) ? lo : hi;
      if (t < best.t_star) {
        best.t_star = t;
        best.coordinate = i;
      }
    }
    if (std::isfinite(best.t_star)) {
      best.loss = loss_sq(path.at(best.t_star), c.data);
      return best;
    }
    z_prev = z_cur;
  }
  throw PreconditionError("barrier_witness: no sign crossing of A W_1 found along the path");
}

}  // namespace connectikit
