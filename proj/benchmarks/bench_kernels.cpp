// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "connectikit/numerics.hpp"
#include "connectikit/optimizers.hpp"
#include "connectikit/paths.hpp"
#include "connectikit/rng.hpp"

namespace ck = connectikit;

namespace {

ck::Mat gaussian(ck::Rng& rng, std::size_t r, std::size_t c) {
  ck::Mat a(r, c);
  for (double& v : a.data()) v = rng.normal();
  return a;
}

void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ck::Rng rng(1);
  const ck::Mat a = gaussian(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(ck::svd(a));
}
BENCHMARK(BM_Svd)->Arg(8)->Arg(32)->Arg(64);

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ck::Rng rng(2);
  const ck::Mat cost = gaussian(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(ck::solve_assignment(cost));
}
BENCHMARK(BM_Assignment)->Arg(32)->Arg(128);

// Feasibility of {x : Gx >= 0, Sx <= -eps, -1 <= x <= 1} for random sign rows.
void BM_LpFeasible(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ck::Rng rng(3);
  const ck::Mat x = gaussian(rng, 2 * n, n);
  const ck::Vec h(n, 1.0);
  ck::Mat ge(0, n), strict(0, n);
  std::vector<double> ge_rows, strict_rows;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    auto& dst = ck::dot(row, h) >= 0.0 ? ge_rows : strict_rows;
    dst.insert(dst.end(), row.begin(), row.end());
  }
  ge = ck::Mat(ge_rows.size() / n, n, ge_rows);
  strict = ck::Mat(strict_rows.size() / n, n, strict_rows);
  const std::vector<ck::Interval> bounds(n, ck::Interval{-1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(ck::lp_feasible(ck::Mat(0, n), {}, bounds, strict, 1e-6, ge));
}
BENCHMARK(BM_LpFeasible)->Arg(4)->Arg(16);

void BM_TrainStep(benchmark::State& state) {
  const auto kind = static_cast<ck::OptimizerKind>(state.range(0));
  const auto tp = ck::gen_teacher_data(4, 256, 8, 4);
  ck::OptimizerConfig cfg;
  cfg.kind = kind;
  cfg.lambda = 0.01;
  const ck::TwoLayerNet net = ck::random_init(8, 32, 5, 0.5);
  const ck::OptState st = ck::OptState::zeros_like(net, kind);
  for (auto _ : state) {
    const ck::Gradient g = ck::grad(net, tp.data);
    benchmark::DoNotOptimize(ck::optimizer_step(net, st, g, cfg));
  }
  state.SetLabel(std::string(ck::to_string(kind)));
}
BENCHMARK(BM_TrainStep)->DenseRange(0, 3);

void BM_EvalPath(benchmark::State& state) {
  const auto threads = static_cast<std::size_t>(state.range(0));
  const auto tp = ck::gen_teacher_data(6, 256, 8, 4);
  const ck::PiecewisePath p =
      ck::linear_path(ck::random_init(8, 32, 7, 0.5), ck::random_init(8, 32, 8, 0.5));
  const ck::RegSetSpec spec{ck::NormKind::Operator, 1.0, 32};
  for (auto _ : state) benchmark::DoNotOptimize(ck::eval_path(p, tp.data, spec, 201, threads));
}
BENCHMARK(BM_EvalPath)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
