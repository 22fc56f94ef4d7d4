// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "connectikit/io.hpp"
#include "connectikit/optimizers.hpp"
#include "connectikit_cli/cli.hpp"
#include "instances.hpp"
#include "test_support.hpp"

namespace ck = connectikit;
namespace cli = connectikit::cli;
using ck::testing::TempDir;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::map<std::string, std::string> read_kv(const std::filesystem::path& p) {
  std::map<std::string, std::string> kv;
  std::istringstream in(ck::read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void save_net(const std::filesystem::path& p, const ck::TwoLayerNet& net) { ck::save_checkpoint(p, {net, {}}); }

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, cli::kExitOk); }

TEST(GenData, TeacherDeterministic) {
  TempDir dir("gen");
  const std::vector<std::string> base{"gen-data", "--mode", "teacher", "--n", "64", "--d", "4", "--teacher-width", "8",
                                      "--seed", "7", "--out"};
  auto a = base;
  a.push_back(dir.str("a"));
  auto b = base;
  b.push_back(dir.str("b"));
  ASSERT_EQ(run(a).code, cli::kExitOk);
  ASSERT_EQ(run(b).code, cli::kExitOk);
  for (const char* f : {"dataset.json", "teacher.json"}) {
    EXPECT_EQ(ck::read_file(dir.path() / "a" / f), ck::read_file(dir.path() / "b" / f)) << f;
  }
  const auto data = ck::load_dataset(dir.path() / "a" / "dataset.json");
  EXPECT_EQ(data.n(), 64u);
  EXPECT_TRUE(ck::in_solution_set(ck::load_checkpoint(dir.path() / "a" / "teacher.json").net, data, 0.0));
}

TEST(GenData, FiniteWritesConstructionAndResidual) {
  TempDir dir("finite");
  const CliRun r = run({"gen-data", "--mode", "finite", "--d", "16", "--out", dir.str("f")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("max |A*B - I|"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "f" / "construction.json"));
  EXPECT_EQ(ck::load_dataset(dir.path() / "f" / "dataset.json").n(), 32u);
}

TEST(GenData, MissingDimensionIsUsage) {
  TempDir dir("gen-bad");
  EXPECT_EQ(run({"gen-data", "--mode", "teacher", "--out", dir.str("x")}).code, cli::kExitUsage);
  EXPECT_EQ(run({"gen-data", "--mode", "weird", "--d", "2", "--out", dir.str("x")}).code, cli::kExitUsage);
}

class CliToy : public ::testing::Test {
 protected:
  void SetUp() override { ASSERT_EQ(run({"gen-data", "--mode", "toy", "--out", dir_.str("toy")}).code, 0); }
  std::string toy() const { return dir_.str("toy/dataset.json"); }
  TempDir dir_{"toy"};
};

TEST_F(CliToy, TrainAdamWConverges) {
  const CliRun r = run({"train", "--data", toy(), "--optimizer", "adamw", "--width", "4", "--eta", "1e-2", "--steps",
                     "5000", "--lambda", "0.1", "--seed", "1", "--out", dir_.str("tr")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto ckpt = ck::load_checkpoint(dir_.path() / "tr" / "checkpoint.json");
  EXPECT_LT(std::get<double>(ckpt.meta.at("final_loss")), 1e-4);
  EXPECT_EQ(read_kv(dir_.path() / "tr" / "dual_norm.txt").count("pass"), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir_.path() / "tr" / "losses.csv"));
}

TEST_F(CliToy, ZeroStepsCheckpointIsInit) {
  ASSERT_EQ(run({"train", "--data", toy(), "--width", "5", "--steps", "0", "--seed", "9", "--init-scale", "0.3",
                 "--out", dir_.str("z")})
                .code,
            0);
  EXPECT_EQ(ck::load_checkpoint(dir_.path() / "z" / "checkpoint.json").net, ck::random_init(1, 5, 9, 0.3));
}

TEST_F(CliToy, UnknownOptimizerIsUsage) {
  EXPECT_EQ(run({"train", "--data", toy(), "--optimizer", "sgd", "--out", dir_.str("u")}).code, cli::kExitUsage);
}

TEST_F(CliToy, MissingDatasetFileIsUsage) {
  EXPECT_EQ(run({"train", "--data", dir_.str("nope.json"), "--out", dir_.str("u")}).code, cli::kExitUsage);
}

TEST_F(CliToy, ManifestReplayReproducesRun) {
  ASSERT_EQ(run({"train", "--data", toy(), "--optimizer", "muon", "--width", "6", "--eta", "5e-3", "--steps", "300",
                 "--lambda", "0.2", "--seed", "4", "--out", dir_.str("m1")})
                .code,
            0);
  const std::string manifest = dir_.str("m1/manifest.ini");
  ASSERT_EQ(run({"--config", manifest, "train", "--out", dir_.str("m2")}).code, 0);
  EXPECT_EQ(ck::read_file(dir_.path() / "m1" / "checkpoint.json"), ck::read_file(dir_.path() / "m2" / "checkpoint.json"));
  EXPECT_EQ(ck::read_file(dir_.path() / "m1" / "losses.csv"), ck::read_file(dir_.path() / "m2" / "losses.csv"));
}

TEST_F(CliToy, ConstructiveOnMuonSolutions) {
  for (const char* seed : {"1", "2"}) {
    const CliRun r = run({"train", "--data", toy(), "--optimizer", "muon", "--width", "12", "--eta", "2e-3", "--steps",
                       "20000", "--lambda", "0.5", "--seed", seed, "--out", dir_.str(std::string("mu") + seed)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const CliRun strict = run({"connect", "--a", dir_.str("mu1/checkpoint.json"), "--b", dir_.str("mu2/checkpoint.json"),
                          "--data", toy(), "--method", "constructive", "--norm", "operator", "--lambda", "0.5",
                          "--out", dir_.str("c0")});
  // Trained endpoints only reach loss < 1e-8, so the default 1e-8 residual tolerance rejects them.
  EXPECT_EQ(strict.code, cli::kExitPrecondition) << strict.err;
  const CliRun r = run({"connect", "--a", dir_.str("mu1/checkpoint.json"), "--b", dir_.str("mu2/checkpoint.json"),
                     "--data", toy(), "--method", "constructive", "--norm", "operator", "--lambda", "0.5", "--tol",
                     "1e-3", "--out", dir_.str("c1")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = read_kv(dir_.path() / "c1" / "summary.txt");
  EXPECT_LE(std::stod(kv.at("max_loss")), 1e-8);
  EXPECT_LE(std::max(std::stod(kv.at("max_R_W")), std::stod(kv.at("max_R_alpha"))), 2.0 + 1e-3);
}

TEST_F(CliToy, ConstructiveOnExactMembers) {
  ck::Rng rng(5);
  const auto a = ck::testing::toy_member(rng, 12);
  const auto b = ck::testing::toy_member(rng, 12);
  save_net(dir_.path() / "a.json", a);
  save_net(dir_.path() / "b.json", b);
  const double r = std::max(ck::constraint_values(a, ck::NormKind::Operator).max(),
                            ck::constraint_values(b, ck::NormKind::Operator).max());
  const CliRun res = run({"connect", "--a", dir_.str("a.json"), "--b", dir_.str("b.json"), "--data", toy(), "--method",
                       "constructive", "--norm", "operator", "--lambda", ck::format_double(1.0 / r), "--out",
                       dir_.str("ce")});
  ASSERT_EQ(res.code, 0) << res.err;
  const auto kv = read_kv(dir_.path() / "ce" / "summary.txt");
  EXPECT_LE(std::stod(kv.at("max_loss")), 1e-8);
  // Radius too small for the endpoints: precondition failure.
  const CliRun bad = run({"connect", "--a", dir_.str("a.json"), "--b", dir_.str("b.json"), "--data", toy(), "--method",
                       "constructive", "--norm", "operator", "--lambda", ck::format_double(2.0 / r), "--out",
                       dir_.str("cb")});
  EXPECT_EQ(bad.code, cli::kExitPrecondition);
  EXPECT_NE(bad.err.find("regularized"), std::string::npos) << bad.err;
}

TEST_F(CliToy, ShapeMismatchIsUsage) {
  save_net(dir_.path() / "a.json", ck::TwoLayerNet::zeros(1, 3));
  save_net(dir_.path() / "b.json", ck::TwoLayerNet::zeros(1, 4));
  EXPECT_EQ(run({"connect", "--a", dir_.str("a.json"), "--b", dir_.str("b.json"), "--data", toy(), "--out",
                 dir_.str("s")})
                .code,
            cli::kExitUsage);
}

TEST_F(CliToy, AnalyzePatternsAndSupports) {
  const CliRun p = run({"analyze", "patterns", "--data", toy(), "--out", dir_.str("ap")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(read_kv(dir_.path() / "ap" / "patterns.txt").at("P"), "3");
  const CliRun s = run({"analyze", "supports", "--data", toy(), "--cap", "3", "--out", dir_.str("as")});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto kv = read_kv(dir_.path() / "as" / "supports.txt");
  EXPECT_EQ(kv.at("supports"), "1");
  EXPECT_EQ(kv.at("m_star"), "4");
  EXPECT_EQ(kv.at("equalized_witness_in_reg_set"), "true");
}

TEST_F(CliToy, AnalyzeRegime) {
  const CliRun r = run({"analyze", "regime", "--data", toy(), "--norm", "frobenius", "--width", "12", "--lambda", "0.5",
                     "--lambda-fit", "0.70710678", "--out", dir_.str("ar")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = ck::read_file(dir_.path() / "ar" / "regime.txt");
  EXPECT_NE(text.find("connectivity=holds"), std::string::npos) << text;
}

TEST(AnalyzeFinite, SixteenMatchesLadder) {
  TempDir dir("an-finite");
  const CliRun r = run({"analyze", "finite", "--d", "16", "--threads", "4", "--out", dir.str("f")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = read_kv(dir.path() / "f" / "finite_report.txt");
  EXPECT_NEAR(std::stod(kv.at("r_inf_1")), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(kv.at("r_inf_2")), 1.0327955589886444, 1e-10);
  EXPECT_NEAR(std::stod(kv.at("r_op_1")), 2.0, 1e-12);
  EXPECT_NEAR(std::stod(kv.at("r_op_2")), 2.3432888729005876, 1e-10);
  EXPECT_GE(std::stod(kv.at("barrier_loss")), 0.5 - 1e-9);
  const std::string csv = ck::read_file(dir.path() / "f" / "ladder.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sigma_id,r_inf,r_op");
  EXPECT_EQ(run({"analyze", "finite", "--d", "30", "--out", dir.str("g")}).code, cli::kExitUsage);
}

TEST(Connect, PolychainBeatsLinearOnPermutedPair) {
  TempDir dir("poly");
  ck::Rng rng(8);
  const auto a = ck::testing::random_net(rng, 2, 6);
  const auto data = ck::testing::self_labelled(a, ck::testing::random_mat(rng, 16, 2));
  ck::save_dataset(dir.path() / "d.json", data);
  save_net(dir.path() / "a.json", a);
  save_net(dir.path() / "b.json", ck::permute_neurons(a, std::vector<std::size_t>{5, 4, 3, 2, 1, 0}));
  const CliRun r = run({"connect", "--a", dir.str("a.json"), "--b", dir.str("b.json"), "--data", dir.str("d.json"),
                     "--method", "polychain", "--iterations", "500", "--lr", "1e-2", "--samples", "201", "--out",
                     dir.str("p")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = read_kv(dir.path() / "p" / "summary.txt");
  EXPECT_LE(std::stod(kv.at("barrier")), std::stod(kv.at("linear_barrier")));
  for (const char* f : {"path.json", "profile.csv", "spectra.csv", "manifest.ini"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "p" / f)) << f;
}

TEST(Report, DeterministicChartsAndFlatCurve) {
  TempDir dir("report");
  ck::write_file(dir.path() / "profile.csv",
                 "t,loss,R_W,R_alpha,stable_rank\n0,0.5,1,1,1\n0.5,0.5,1,1,1.5\n1,0.5,1,1,2\n");
  ck::write_file(dir.path() / "spectra.csv", "t,index,sigma\n0,0,2\n0,1,1\n0.5,0,1.5\n0.5,1,1\n1,0,1\n1,1,1\n");
  const std::vector<std::string> args{"report", "--profile", dir.str("profile.csv"), "--spectra",
                                      dir.str("spectra.csv"), "--out"};
  auto a1 = args;
  a1.push_back(dir.str("r1"));
  auto a2 = args;
  a2.push_back(dir.str("r2"));
  ASSERT_EQ(run(a1).code, 0);
  ASSERT_EQ(run(a2).code, 0);
  for (const char* f : {"barrier.svg", "stable_rank.svg", "norms.svg", "spectra.svg"}) {
    EXPECT_EQ(ck::read_file(dir.path() / "r1" / f), ck::read_file(dir.path() / "r2" / f)) << f;
  }
  const std::string spectra = ck::read_file(dir.path() / "r1" / "spectra.svg");
  for (const char* label : {"t = 0", "t = 0.5", "t = 1"}) EXPECT_NE(spectra.find(label), std::string::npos) << label;
  // Constant loss: every point of the loss polyline sits at the same height.
  const std::string svg = ck::read_file(dir.path() / "r1" / "barrier.svg");
  const auto start = svg.find("points=\"") + 8;
  const std::string pts = svg.substr(start, svg.find('"', start) - start);
  std::istringstream in(pts);
  std::string pair, y0;
  while (in >> pair) {
    const std::string y = pair.substr(pair.find(',') + 1);
    if (y0.empty()) y0 = y;
    EXPECT_EQ(y, y0);
  }
}

TEST(Report, MissingColumnIsUsage) {
  TempDir dir("report-bad");
  ck::write_file(dir.path() / "profile.csv", "t,loss\n0,1\n1,1\n");
  EXPECT_EQ(run({"report", "--profile", dir.str("profile.csv"), "--out", dir.str("r")}).code, cli::kExitUsage);
}
