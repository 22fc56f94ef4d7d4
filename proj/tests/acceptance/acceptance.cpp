// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any
// selected criterion fails. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "connectikit/arrangement.hpp"
#include "connectikit/construction.hpp"
#include "connectikit/error.hpp"
#include "connectikit/io.hpp"
#include "connectikit/optimizers.hpp"
#include "connectikit/paths.hpp"
#include "instances.hpp"
#include "test_support.hpp"

namespace ck = connectikit;
using ck::Dataset;
using ck::Mat;
using ck::NormKind;
using ck::PiecewisePath;
using ck::RegSetSpec;
using ck::TwoLayerNet;
using ck::Vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("violated: " + what);
    }
  }
  void info(const std::string& what) { notes.push_back(what); }
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string sigma_str(const ck::Sigma& s) {
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sample_t(std::size_t k, std::size_t samples) {
  return k + 1 == samples ? 1.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
}

double output_drift(const PiecewisePath& p, const Dataset& data, std::size_t samples = 101) {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    worst = std::max(worst, ck::max_abs_diff(ck::testing::reference_forward(p.at(sample_t(k, samples)), data.x), data.y));
  }
  return worst;
}

std::vector<ck::ConstraintValues> sampled_values(const PiecewisePath& p, NormKind k, std::size_t samples = 101) {
  std::vector<ck::ConstraintValues> out;
  for (std::size_t s = 0; s < samples; ++s) out.push_back(ck::constraint_values(p.at(sample_t(s, samples)), k));
  return out;
}

// ---------------------------------------------------------------------------------------------
// 1. Exhaustive norm ladder against closed forms.

Outcome criterion_1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t d : {8u, 16u, 20u}) {
    const double dd = static_cast<double>(d);
    const double L = std::sqrt(dd) / 2.0;
    const ck::Construction c = ck::build_construction(d, L);
    const ck::NormLadder ladder = ck::norm_ladder(c, 0);

    ck::Sigma h1(d, 1), h2(d, -1);
    h2[0] = 1;
    auto neg = [](ck::Sigma s) {
      for (int& v : s) v = -v;
      return s;
    };
    const std::set<ck::Sigma> want_inf{h1, neg(h1)}, want_op{h2, neg(h2)};
    const std::set<ck::Sigma> got_inf(ladder.argmin_inf.begin(), ladder.argmin_inf.end());
    const std::set<ck::Sigma> got_op(ladder.argmin_op.begin(), ladder.argmin_op.end());
    const std::string tag = "d=" + std::to_string(d) + ": ";
    o.require(got_inf == want_inf && ladder.argmin_inf.size() == 2, tag + "l_inf argmin set is {+-h1}");
    o.require(got_op == want_op && ladder.argmin_op.size() == 2, tag + "operator argmin set is {+-h2}");

    const double want_rinf2 = std::sqrt(1.0 + (std::sqrt(dd) / 2.0 - 1.0) / (dd - 1.0));
    o.require(std::abs(ladder.r_inf_1 - 1.0) <= 1e-12, tag + "r_inf_1 = " + num(ladder.r_inf_1) + " within 1e-12 of 1");
    o.require(std::abs(ladder.r_inf_2 - want_rinf2) <= 1e-10,
              tag + "r_inf_2 = " + num(ladder.r_inf_2) + " within 1e-10 of " + num(want_rinf2));
    const double want_rop2 = ck::predicted_r_op_2(d, L);
    o.require(std::abs(ladder.r_op_2 - want_rop2) <= 1e-10,
              tag + "r_op_2 = " + num(ladder.r_op_2) + " within 1e-10 of " + num(want_rop2));
    o.info(tag + "r_inf_1=" + num(ladder.r_inf_1) + " r_inf_2=" + num(ladder.r_inf_2) + " (formula " +
           num(want_rinf2) + ", max{L-1,1} form " + num(ck::predicted_r_inf_2_general(d, L)) + ") r_op_1=" +
           num(ladder.r_op_1) + " r_op_2=" + num(ladder.r_op_2) + " (formula " + num(want_rop2) + ")");
    if (!ladder.runner_up_inf.empty()) o.info(tag + "l_inf runner-up example " + sigma_str(ladder.runner_up_inf.front()));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime " + num(secs) + " s < 30 s");
  o.summary = "ladder at d in {8,16,20}, " + num(secs) + " s";
  return o;
}

// ---------------------------------------------------------------------------------------------
// 2. Closed-form component norms against grid minimization.

Outcome criterion_2() {
  Outcome o;
  const ck::Construction c = ck::build_construction(8, std::sqrt(8.0) / 2.0);
  ck::Rng rng = ck::Rng(2).substream("sigma");
  double worst_inf = 0.0, worst_op = 0.0;
  for (int k = 0; k < 20; ++k) {
    ck::Sigma s(8);
    for (int& v : s) v = rng.uniform() < 0.5 ? -1 : 1;
    const auto closed = ck::component_norms(c, s);
    const auto brute = ck::component_norms_brute(c, s);
    worst_inf = std::max(worst_inf, std::abs(closed.r_inf - brute.r_inf));
    worst_op = std::max(worst_op, std::abs(closed.r_op - brute.r_op));
  }
  o.require(worst_inf <= 1e-3, "component r_inf closed vs brute max diff " + num(worst_inf) + " <= 1e-3");
  o.require(worst_op <= 1e-3, "component r_op closed vs brute max diff " + num(worst_op) + " <= 1e-3");

  ck::Rng prng = ck::Rng(2).substream("cpq");
  double worst_cpq = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t d = 2 + prng.below(7);
    const Vec p = ck::testing::random_vec(prng, d);
    const Vec q = ck::testing::random_vec(prng, d);
    const double pq = ck::dot(p, q);
    const double formula = std::pow(ck::dot(p, p) + ck::dot(q, q) + 2.0 * std::abs(pq), 0.25);
    worst_cpq = std::max(worst_cpq, std::abs(formula - ck::cpq_norms_brute(p, q).r_op));
    o.require(std::abs(formula - ck::cpq_op_closed_form(p, q)) <= 1e-12, "cpq_op_closed_form matches the formula");
  }
  o.require(worst_cpq <= 1e-3, "C(p,q) operator formula vs grid max diff " + num(worst_cpq) + " <= 1e-3");
  o.summary = "max diffs r_inf " + num(worst_inf) + ", r_op " + num(worst_op) + ", C(p,q) " + num(worst_cpq);
  return o;
}

// ---------------------------------------------------------------------------------------------
// 3. Every sign crossing of A W_1 on paths between the two windows has loss at least 1/2.

struct CrossingScan {
  std::size_t crossings = 0;
  double min_loss = std::numeric_limits<double>::infinity();
};

CrossingScan scan_crossings(const ck::Construction& c, const PiecewisePath& path, std::size_t samples = 1001) {
  CrossingScan out;
  auto z_at = [&](double t) { return ck::matvec(c.a, path.at(t).neuron(0)); };
  Vec z_prev = z_at(0.0);
  for (std::size_t k = 1; k < samples; ++k) {
    const double t_prev = sample_t(k - 1, samples), t_cur = sample_t(k, samples);
    const Vec z_cur = z_at(t_cur);
    for (std::size_t i = 0; i < c.d; ++i) {
      const bool crossed = z_cur[i] == 0.0 || (z_prev[i] != 0.0 && (z_prev[i] > 0.0) != (z_cur[i] > 0.0));
      if (!crossed) continue;
      double lo = t_prev, hi = t_cur, zlo = z_prev[i], zhi = z_cur[i];
      while (hi - lo > 1e-12 && zlo != 0.0 && zhi != 0.0) {
        const double mid = 0.5 * (lo + hi);
        const double zm = z_at(mid)[i];
        if (zm == 0.0 || (zm > 0.0) != (zlo > 0.0)) {
          hi = mid;
          zhi = zm;
        } else {
          lo = mid;
          zlo = zm;
        }
      }
      const double t = std::abs(zlo) <= std::abs(zhi) ? lo : hi;
      ++out.crossings;
      out.min_loss = std::min(out.min_loss, ck::testing::reference_loss(path.at(t), c.data));
    }
    z_prev = z_cur;
  }
  return out;
}

Outcome criterion_3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t d = 16;
  const ck::Construction c = ck::build_construction(d, 2.0);
  const ck::NormLadder ladder = ck::norm_ladder(c, 0);
  const ck::LambdaWindows win = ck::lambda_windows(ladder);
  const ck::Sigma h1(d, 1);
  ck::Sigma h2(d, -1);
  h2[0] = 1;
  const TwoLayerNet a = ck::balanced_component_point(c, h1, NormKind::MaxEntry);
  const TwoLayerNet b = ck::balanced_component_point(c, h2, NormKind::Operator);
  o.require(ck::in_reg_set(a, c.data, {NormKind::MaxEntry, 1.0 / win.inv_lambda_adamw.mid(), 2}),
            "AdamW-window endpoint lies in the max-entry regularized set");
  o.require(ck::in_reg_set(b, c.data, {NormKind::Operator, 1.0 / win.inv_lambda_muon.mid(), 2}),
            "Muon-window endpoint lies in the operator regularized set");

  ck::Rng rng = ck::Rng(3).substream("bends");
  const TwoLayerNet mid = ck::lerp(a, b, 0.5);
  double min_loss = std::numeric_limits<double>::infinity();
  double min_witness = std::numeric_limits<double>::infinity();
  std::size_t crossings = 0;
  for (int k = 0; k < 100; ++k) {
    PiecewisePath path;
    if (k == 0) {
      path = ck::linear_path(a, b);
    } else {
      TwoLayerNet bend = mid;
      const double scale = rng.uniform(0.1, 2.0);
      for (double& v : bend.w.data()) v += scale * rng.normal();
      for (double& v : bend.alpha) v += scale * rng.normal();
      path = ck::polychain_path(a, bend, b);
    }
    const CrossingScan scan = scan_crossings(c, path);
    o.require(scan.crossings > 0, "path " + std::to_string(k) + " crosses at least one hyperplane");
    crossings += scan.crossings;
    min_loss = std::min(min_loss, scan.min_loss);
    min_witness = std::min(min_witness, ck::barrier_witness(c, path).loss);
  }
  o.require(min_loss >= 0.5 - 1e-6, "minimum crossing loss " + num(min_loss) + " >= 0.5 - 1e-6");
  o.require(min_witness >= 0.5 - 1e-6, "barrier_witness minimum loss " + num(min_witness) + " >= 0.5 - 1e-6");
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + num(secs) + " s < 60 s");
  o.summary = "100 paths, " + std::to_string(crossings) + " crossings, min loss " + num(min_loss) + ", " +
              num(secs) + " s";
  return o;
}

// ---------------------------------------------------------------------------------------------
// 4. Constructive connectivity on the toy problem.

Outcome criterion_4() {
  Outcome o;
  const Dataset toy = ck::testing::toy_dataset();
  std::ostringstream sum;
  for (NormKind nk : {NormKind::Frobenius, NormKind::Operator, NormKind::MaxEntry}) {
    const std::size_t m = nk == NormKind::MaxEntry ? 4 : 12;
    ck::Rng rng = ck::Rng(4).substream(std::string(ck::to_string(nk)));
    double worst_loss = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
    for (int pair = 0; pair < 10; ++pair) {
      const TwoLayerNet a = ck::testing::toy_member(rng, m);
      const TwoLayerNet b = ck::testing::toy_member(rng, m);
      const double r = std::max(ck::constraint_values(a, nk).max(), ck::constraint_values(b, nk).max());
      const RegSetSpec spec{nk, 1.0 / r, m};
      const std::string tag = std::string(ck::to_string(nk)) + " pair " + std::to_string(pair);
      try {
        const PiecewisePath path = ck::connect_intra(a, b, toy, spec);
        double max_loss = 0.0, max_norm = 0.0;
        for (std::size_t s = 0; s < 1001; ++s) {
          const TwoLayerNet q = path.at(sample_t(s, 1001));
          max_loss = std::max(max_loss, ck::testing::reference_loss(q, toy));
          max_norm = std::max(max_norm, ck::constraint_values(q, nk).max());
        }
        o.require(max_loss <= 1e-8, tag + ": max loss " + num(max_loss) + " <= 1e-8");
        o.require(max_norm <= spec.radius() + 1e-8, tag + ": max constraint " + num(max_norm) + " <= 1/lambda + 1e-8");
        o.require(ck::max_abs_diff(path.start(), a) == 0.0 && ck::max_abs_diff(path.end(), b) <= 1e-12,
                  tag + ": path endpoints are a and b (start gap " + num(ck::max_abs_diff(path.start(), a)) + ", end gap " + num(ck::max_abs_diff(path.end(), b)) + ")");
        worst_loss = std::max(worst_loss, max_loss);
        worst_excess = std::max(worst_excess, max_norm - spec.radius());
      } catch (const ck::Error& e) {
        o.require(false, tag + ": connect_intra threw: " + e.what());
      }
    }
    sum << ck::to_string(nk) << " (m=" << m << ") max loss " << worst_loss << ", max norm excess " << worst_excess
        << "; ";
  }
  o.summary = sum.str();
  return o;
}

// ---------------------------------------------------------------------------------------------
// 5. Minimal supports against an exhaustive lattice oracle.

Outcome criterion_5() {
  Outcome o;
  const Dataset toy = ck::testing::toy_dataset();
  const ck::PatternSet ps = ck::enum_patterns(toy);
  o.require(ps.count() == 3, "toy has P = 3 patterns");
  const double lambda = 1.0;
  const std::size_t cap = 3;

  std::vector<ck::SupportVector> feasible;
  for (std::size_t code = 0; code < 4096; ++code) {
    ck::SupportVector v{{0, 0, 0}, {0, 0, 0}};
    std::size_t rest = code;
    for (std::size_t k = 0; k < 6; ++k) {
      (k < 3 ? v.t[k] : v.s[k - 3]) = rest % (cap + 1);
      rest /= cap + 1;
    }
    if (ck::pts_feasible(ps, toy, v, lambda).feasible) feasible.push_back(v);
  }
  std::set<ck::SupportVector> oracle;
  for (const auto& v : feasible) {
    bool minimal = true;
    for (const auto& w : feasible)
      if (w != v && w.leq(v)) minimal = false;
    if (minimal) oracle.insert(v);
  }
  const ck::MinimalSupports ms = ck::minimal_supports(ps, toy, lambda, cap);
  const std::set<ck::SupportVector> got(ms.supports.begin(), ms.supports.end());
  const ck::SupportVector expected{{1, 1, 0}, {0, 0, 0}};
  o.require(oracle == std::set<ck::SupportVector>{expected}, "lattice oracle gives exactly {t=(1,1,0), s=(0,0,0)}");
  o.require(got == oracle && ms.supports.size() == oracle.size(), "minimal_supports equals the lattice oracle");

  const std::size_t mstar = ck::critical_width(ms.supports);
  o.require(mstar == 4, "critical_width = " + std::to_string(mstar) + " = 4");

  const ck::PtsResult witness = ck::pts_feasible(ps, toy, expected, lambda);
  const TwoLayerNet eq = ck::equalized_from_witness(expected, witness.witness, lambda, 4);
  o.require(ck::in_reg_set(eq, toy, {NormKind::MaxEntry, lambda, 4}), "equalized witness passes in_reg_set");
  o.summary = std::to_string(feasible.size()) + " feasible lattice points of 4096, minimal " +
              (ms.supports.empty() ? std::string("none") : ms.supports.front().to_string()) + ", m* = " +
              std::to_string(mstar);
  return o;
}

// ---------------------------------------------------------------------------------------------
// 6. Trained nets satisfy the optimizer's implicit-bias constraint.

double oracle_norm(const Mat& a, NormKind k) {
  double out = 0.0;
  switch (k) {
    case NormKind::MaxEntry:
      for (double v : a.data()) out = std::max(out, std::abs(v));
      return out;
    case NormKind::Frobenius:
      for (double v : a.data()) out += v * v;
      return std::sqrt(out);
    case NormKind::Operator:
      return ck::testing::reference_spectral_norm(a);
    default:
      throw std::logic_error("oracle_norm: unsupported norm");
  }
}

NormKind bias_norm(ck::OptimizerKind k) {
  switch (k) {
    case ck::OptimizerKind::AdamW:
    case ck::OptimizerKind::Signum: return NormKind::MaxEntry;
    case ck::OptimizerKind::NormMomGD: return NormKind::Frobenius;
    case ck::OptimizerKind::Muon: return NormKind::Operator;
  }
  return NormKind::MaxEntry;
}

Outcome criterion_6() {
  Outcome o;
  std::ostringstream sum;
  for (auto kind : {ck::OptimizerKind::AdamW, ck::OptimizerKind::Signum, ck::OptimizerKind::NormMomGD,
                    ck::OptimizerKind::Muon}) {
    double worst_ratio = 0.0, worst_loss = 0.0;
    for (double lambda : {0.05, 0.1}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto tp = ck::gen_teacher_data(seed, 16, 2, 2);
        ck::OptimizerConfig cfg;
        cfg.kind = kind;
        cfg.eta = 2e-4;
        cfg.lambda = lambda;
        cfg.steps = 100000;
        const std::string tag = std::string(ck::to_string(kind)) + " lambda=" + num(lambda) + " seed=" +
                                std::to_string(seed);
        try {
          const ck::TrainResult r = ck::train(tp.data, 16, cfg, seed, 0.5);
          const double loss = ck::testing::reference_loss(r.net, tp.data);
          o.require(loss < 1e-4, tag + ": final loss " + num(loss) + " < 1e-4");
          const NormKind k = bias_norm(kind);
          const double kw = oracle_norm(r.net.w, k);
          const double ka = oracle_norm(Mat::column(r.net.alpha), k);
          const double ratio = std::max(kw, ka) * lambda;
          o.require(ratio <= 1.05, tag + ": max{K_d(W), K_d(alpha)} * lambda = " + num(ratio) + " <= 1.05");
          o.require(ck::dual_norm_check(r.net, cfg).pass, tag + ": dual_norm_check passes at 5% slack");
          worst_ratio = std::max(worst_ratio, ratio);
          worst_loss = std::max(worst_loss, loss);
        } catch (const ck::Error& e) {
          o.require(false, tag + ": training threw: " + e.what());
        }
      }
    }
    sum << ck::to_string(kind) << " max lambda*K_d " << worst_ratio << " (loss <= " << worst_loss << "); ";
  }
  o.summary = sum.str();
  return o;
}

// ---------------------------------------------------------------------------------------------
// 7. Path primitives.

Outcome criterion_7() {
  Outcome o;
  ck::Rng root(7);
  double drift = 0.0, gram = 0.0;
  ck::Rng rs = root.substream("swap");
  for (int k = 0; k < 50; ++k) {
    const auto inst = ck::testing::swap_instance(rs);
    const PiecewisePath p = ck::swap_path(inst.net, inst.i, inst.j);
    drift = std::max(drift, output_drift(p, inst.data));
    const Mat g0 = ck::testing::gram(inst.net);
    for (std::size_t s = 0; s < 101; ++s)
      gram = std::max(gram, ck::max_abs_diff(ck::testing::gram(p.at(sample_t(s, 101))), g0));
    const auto e0 = ck::constraint_values(p.start(), NormKind::Frobenius);
    const auto e1 = ck::constraint_values(p.end(), NormKind::Frobenius);
    for (NormKind nk : {NormKind::Frobenius, NormKind::Operator, NormKind::MaxEntry}) {
      const double bound = std::max(ck::constraint_values(p.start(), nk).w, ck::constraint_values(p.end(), nk).w);
      for (const auto& v : sampled_values(p, nk))
        o.require(v.w <= bound + 1e-10, "swap " + std::to_string(k) + ": " + std::string(ck::to_string(nk)) +
                                            " norm within endpoint values");
    }
    o.require(std::abs(e0.w - e1.w) <= 1e-10, "swap " + std::to_string(k) + ": Frobenius norm conserved");
  }
  o.require(gram <= 1e-10, "swap Gram drift " + num(gram) + " <= 1e-10");

  ck::Rng rm = root.substream("merge");
  for (int k = 0; k < 50; ++k) {
    const auto inst = ck::testing::merge_instance(rm);
    const PiecewisePath p = ck::merge_path(inst.net, inst.i, inst.j, inst.data);
    drift = std::max(drift, output_drift(p, inst.data));
    const double a0 = ck::norm2(inst.net.alpha);
    const double fro0 = ck::constraint_values(inst.net, NormKind::Frobenius).w;
    const double op0 = ck::constraint_values(inst.net, NormKind::Operator).w;
    bool ok = p.end().neuron_is_zero(inst.i);
    for (const auto& v : sampled_values(p, NormKind::Frobenius))
      ok = ok && std::abs(v.alpha - a0) <= 1e-12 * (1.0 + a0) && v.w <= fro0 + 1e-12;
    for (const auto& v : sampled_values(p, NormKind::Operator)) ok = ok && v.w <= op0 + 1e-10;
    o.require(ok, "merge " + std::to_string(k) + ": zeroes neuron i, conserves ||alpha||_2, Frobenius/operator "
                                                 "nonincreasing vs start");
  }

  ck::Rng rk = root.substream("shrink");
  for (int k = 0; k < 50; ++k) {
    const auto inst = ck::testing::shrink_instance(rk);
    const PiecewisePath p = ck::shrink_path(inst.net, inst.i);
    drift = std::max(drift, output_drift(p, inst.data));
    bool ok = p.end().neuron_is_zero(inst.i);
    for (NormKind nk : {NormKind::MaxEntry, NormKind::Frobenius, NormKind::Operator}) {
      const auto vals = sampled_values(p, nk);
      for (std::size_t s = 1; s < vals.size(); ++s)
        ok = ok && vals[s].w <= vals[s - 1].w + 1e-12 && vals[s].alpha <= vals[s - 1].alpha + 1e-12;
    }
    o.require(ok, "shrink " + std::to_string(k) + ": zeroes the neuron with nonincreasing norms");
  }

  ck::Rng re = root.substream("equalize");
  for (int k = 0; k < 50; ++k) {
    const auto inst = ck::testing::equalize_instance(re);
    const double radius = ck::constraint_values(inst.net, NormKind::MaxEntry).max();
    const RegSetSpec spec{NormKind::MaxEntry, 1.0 / radius, inst.net.width()};
    const PiecewisePath p = ck::equalize_path(inst.net, inst.data, spec);
    drift = std::max(drift, output_drift(p, inst.data));
    const double w0 = ck::constraint_values(inst.net, NormKind::MaxEntry).w;
    bool ok = true;
    for (const auto& v : sampled_values(p, NormKind::MaxEntry))
      ok = ok && v.w <= w0 + 1e-12 && v.max() <= radius * (1.0 + 1e-12);
    const TwoLayerNet end = p.end();
    for (std::size_t n = 0; n < end.width(); ++n)
      ok = ok && (end.alpha[n] == 0.0 || std::abs(std::abs(end.alpha[n]) - radius) <= 1e-12 * radius);
    o.require(ok, "equalize " + std::to_string(k) + ": max-entry norm nonincreasing, constraint held, endpoint "
                                                    "equalized");
  }

  ck::Rng rd = root.substream("disjoint");
  for (int k = 0; k < 50; ++k) {
    const auto inst = ck::testing::disjoint_instance(rd);
    const PiecewisePath p = ck::disjoint_interp_path(inst.a, inst.b);
    drift = std::max(drift, output_drift(p, inst.data));
    bool ok = true;
    for (NormKind nk : {NormKind::Frobenius, NormKind::Operator}) {
      const auto ea = ck::constraint_values(inst.a, nk);
      const auto eb = ck::constraint_values(inst.b, nk);
      for (const auto& v : sampled_values(p, nk))
        ok = ok && v.w <= std::max(ea.w, eb.w) + 1e-10 && v.alpha <= std::max(ea.alpha, eb.alpha) + 1e-12;
    }
    o.require(ok, "disjoint-interp " + std::to_string(k) + ": norms within endpoint maxima");
  }
  o.require(drift <= 1e-9, "max forward drift " + num(drift) + " <= 1e-9");
  o.summary = "250 instances, max forward drift " + num(drift) + ", swap Gram drift " + num(gram);
  return o;
}

// ---------------------------------------------------------------------------------------------
// 8. Polychain vs linear on independently trained nets.

Outcome criterion_8() {
  Outcome o;
  std::ostringstream sum;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto tp = ck::gen_teacher_data(seed, 256, 8, 4);
    ck::OptimizerConfig cfg;
    cfg.kind = ck::OptimizerKind::AdamW;
    cfg.eta = 3e-3;
    cfg.lambda = 0.0;
    cfg.steps = 3000;
    const TwoLayerNet a = ck::train(tp.data, 32, cfg, 1000 + 2 * seed, 0.5).net;
    const TwoLayerNet b = ck::train(tp.data, 32, cfg, 1001 + 2 * seed, 0.5).net;
    const RegSetSpec spec{NormKind::Frobenius, 1.0, 32};
    const double lin = ck::eval_path(ck::linear_path(a, b), tp.data, spec).barrier;
    const TwoLayerNet aligned = ck::align_permutation(a, b, ck::AlignMode::Weights).aligned;
    const double alin = ck::eval_path(ck::linear_path(a, aligned), tp.data, spec).barrier;
    ck::PolychainConfig pc;
    pc.iterations = 2000;
    pc.lr = 3e-4;
    pc.seed = seed;
    const double poly = ck::eval_path(ck::polychain_fit(a, aligned, tp.data, pc).path, tp.data, spec).barrier;
    const std::string tag = "seed " + std::to_string(seed);
    o.require(alin <= lin, tag + ": aligned linear " + num(alin) + " <= unaligned linear " + num(lin));
    o.require(poly <= alin, tag + ": aligned polychain " + num(poly) + " <= aligned linear " + num(alin));
    o.info(tag + ": linear " + num(lin) + ", aligned " + num(alin) + ", polychain " + num(poly));
    sum << "s" << seed << " " << lin << "/" << alin << "/" << poly << " ";
  }
  o.summary = "barriers linear/aligned/polychain: " + sum.str();
  return o;
}

// ---------------------------------------------------------------------------------------------
// 9. Analytic gradient against central differences.

Outcome criterion_9() {
  Outcome o;
  ck::Rng rng = ck::Rng(9).substream("nets");
  double worst = 0.0;
  int accepted = 0;
  while (accepted < 50) {
    const std::size_t d = 1 + rng.below(5);
    const std::size_t m = 1 + rng.below(8);
    const std::size_t n = 2 + rng.below(12);
    const TwoLayerNet net = ck::testing::random_net(rng, d, m);
    const Mat x = ck::testing::random_mat(rng, n, d);
    if (ck::testing::min_preactivation(net, x) <= 1e-3) continue;
    const Dataset data{x, ck::testing::random_vec(rng, n)};
    const ck::Gradient g = ck::grad(net, data);
    Vec analytic(g.w.data().begin(), g.w.data().end());
    analytic.insert(analytic.end(), g.alpha.begin(), g.alpha.end());
    const Vec fd = ck::testing::finite_difference_grad(net, data, 1e-6);
    double diff = 0.0;
    for (std::size_t k = 0; k < fd.size(); ++k) diff = std::max(diff, std::abs(analytic[k] - fd[k]));
    const double rel = diff / std::max(ck::norm_inf(fd), 1e-12);
    worst = std::max(worst, rel);
    ++accepted;
  }
  o.require(worst <= 1e-5, "max relative error " + num(worst) + " <= 1e-5");
  o.summary = "50 kink-free nets, max relative error " + num(worst);
  return o;
}

// ---------------------------------------------------------------------------------------------
// 10. Spectrum tooling.

bool csv_well_formed(const std::string& csv, std::string& why) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != "t,loss,R_W,R_alpha,stable_rank") {
    why = "header '" + line + "'";
    return false;
  }
  double prev_t = -std::numeric_limits<double>::infinity();
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (vals.size() != 5) {
      why = "row with " + std::to_string(vals.size()) + " cells";
      return false;
    }
    for (double v : vals)
      if (!std::isfinite(v)) {
        why = "non-finite value";
        return false;
      }
    if (!(vals[0] > prev_t)) {
      why = "t not increasing at row " + std::to_string(rows);
      return false;
    }
    prev_t = vals[0];
    ++rows;
  }
  if (rows < 2 || prev_t != 1.0) {
    why = "too few rows or t does not end at 1";
    return false;
  }
  return true;
}

Outcome criterion_10() {
  Outcome o;
  for (std::size_t k : {2u, 8u, 32u}) {
    const double sr = ck::stable_rank(Mat::identity(k));
    o.require(sr == static_cast<double>(k), "stable_rank(I_" + std::to_string(k) + ") = " + num(sr));
  }

  // Cross-norm demo: an AdamW-window point and a Muon-window point of the d = 16 construction,
  // plus a pair of nets trained by AdamW and Muon on the same teacher data.
  const ck::Construction c = ck::build_construction(16, 2.0);
  const ck::Sigma h1(16, 1);
  ck::Sigma h2(16, -1);
  h2[0] = 1;
  const TwoLayerNet pa = ck::balanced_component_point(c, h1, NormKind::MaxEntry);
  const TwoLayerNet pm = ck::balanced_component_point(c, h2, NormKind::Operator);
  const ck::PathProfile construct_prof =
      ck::eval_path(ck::linear_path(pa, pm), c.data, {NormKind::Operator, 0.5, 2}, 201);

  const auto tp = ck::gen_teacher_data(10, 64, 4, 4);
  ck::OptimizerConfig cfg;
  cfg.eta = 2e-3;
  cfg.lambda = 0.05;
  cfg.steps = 4000;
  cfg.kind = ck::OptimizerKind::AdamW;
  const TwoLayerNet ta = ck::train(tp.data, 16, cfg, 11, 0.5).net;
  cfg.kind = ck::OptimizerKind::Muon;
  const TwoLayerNet tm = ck::train(tp.data, 16, cfg, 12, 0.5).net;
  const ck::PathProfile trained_prof =
      ck::eval_path(ck::linear_path(ta, tm), tp.data, {NormKind::Operator, 0.05, 16}, 201);

  for (const auto* prof : {&construct_prof, &trained_prof}) {
    std::string why;
    o.require(csv_well_formed(ck::profile_to_csv(*prof), why), "profile CSV well formed" + (why.empty() ? "" : ": " + why));
    const double s0 = prof->samples.front().stable_rank, s1 = prof->samples.back().stable_rank;
    o.require(std::isfinite(s0) && std::isfinite(s1) && s0 > 0.0 && s1 > 0.0, "endpoint stable ranks are positive");
  }
  const std::string demo_c = "construction AdamW-window " + num(construct_prof.samples.front().stable_rank) +
                             " -> Muon-window " + num(construct_prof.samples.back().stable_rank);
  const std::string demo_t = "trained AdamW " + num(trained_prof.samples.front().stable_rank) + " -> Muon " +
                             num(trained_prof.samples.back().stable_rank);
  o.info("cross-norm demo (reported, not asserted): " + demo_c + "; " + demo_t);
  o.summary = "identity stable ranks exact; endpoint stable ranks: " + demo_c + "; " + demo_t;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--only" && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else {
      std::cerr << "usage: connectikit_acceptance [--only N]\n";
      return 2;
    }
  }
  const std::vector<Criterion> criteria{
      {1, "closed-form norm ladder vs exhaustive enumeration", criterion_1},
      {2, "component norm oracles", criterion_2},
      {3, "barrier between AdamW and Muon windows", criterion_3},
      {4, "constructive intra-optimizer connectivity on the toy", criterion_4},
      {5, "minimal supports and critical width", criterion_5},
      {6, "implicit-bias constraint after training", criterion_6},
      {7, "path primitives", criterion_7},
      {8, "polychain vs linear after alignment", criterion_8},
      {9, "analytic gradient vs central differences", criterion_9},
      {10, "spectrum tooling", criterion_10},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "--only must be between 1 and " << criteria.size() << '\n';
    return 2;
  }
  bool all_pass = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.summary = std::string("exception: ") + e.what();
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " | " << out.summary
              << '\n';
    for (const auto& n : out.notes) std::cout << "    " << n << '\n';
    std::cout.flush();
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
