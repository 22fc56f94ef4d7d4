// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "connectikit/error.hpp"
#include "connectikit/io.hpp"
#include "test_support.hpp"

namespace ck = connectikit;
using ck::Mat;
using ck::TwoLayerNet;
using ck::Vec;

TEST(Io, CheckpointRoundTripIsBitExact) {
  ck::Rng rng(71);
  ck::Checkpoint ck0{ck::testing::random_net(rng, 3, 4), {}};
  ck0.net.alpha[1] = 1.0 / 3.0;
  ck0.meta["optimizer"] = std::string("muon");
  ck0.meta["eta"] = 1e-3;
  ck0.meta["converged"] = true;
  const auto back = ck::checkpoint_from_text(ck::checkpoint_to_text(ck0));
  EXPECT_EQ(back.net, ck0.net);
  EXPECT_EQ(std::get<std::string>(back.meta.at("optimizer")), "muon");
  EXPECT_EQ(std::get<double>(back.meta.at("eta")), 1e-3);
  EXPECT_TRUE(std::get<bool>(back.meta.at("converged")));
}

TEST(Io, DatasetRoundTrip) {
  const auto tp = ck::gen_teacher_data(3, 12, 3, 2);
  const auto back = ck::dataset_from_text(ck::dataset_to_text(tp.data));
  EXPECT_EQ(back.x, tp.data.x);
  EXPECT_EQ(back.y, tp.data.y);
}

TEST(Io, PathRoundTripPreservesEvaluation) {
  ck::Rng rng(72);
  const TwoLayerNet a = ck::testing::random_net(rng, 2, 3);
  const TwoLayerNet b = ck::testing::random_net(rng, 2, 3);
  const TwoLayerNet c = ck::testing::random_net(rng, 2, 3);
  ck::PiecewisePath p = ck::polychain_path(a, b, c);
  TwoLayerNet z = c;
  for (std::size_t r = 0; r < 2; ++r) z.w(r, 2) = 0.0;
  z.alpha[2] = 0.0;
  p.append(ck::linear_path(c, z));
  p.append(ck::swap_path(z, 0, 2).reversed().reversed());
  const auto back = ck::path_from_text(ck::path_to_text(p));
  ASSERT_EQ(back.size(), p.size());
  for (int s = 0; s <= 40; ++s) EXPECT_EQ(back.at(s / 40.0), p.at(s / 40.0));
}

TEST(Io, MalformedInputIsUsageError) {
  EXPECT_THROW(ck::checkpoint_from_text("{not json"), ck::UsageError);
  EXPECT_THROW(ck::checkpoint_from_text(R"({"d": 1, "m": 2, "W": [[1]], "alpha": [1, 2]})"), ck::UsageError);
  EXPECT_THROW(ck::dataset_from_text(R"({"n": 2, "d": 1, "X": [[1], [2]]})"), ck::UsageError);
  EXPECT_THROW(ck::path_from_text(R"({"segments": [{"kind": "warp"}]})"), ck::UsageError);
}

TEST(Io, ProfileCsvHeaderAndRows) {
  ck::PathProfile prof;
  prof.samples.push_back({0.0, 1.5, 2.0, 3.0, 1.0});
  prof.samples.push_back({1.0, 0.25, 2.0, 3.0, 1.25});
  const std::string csv = ck::profile_to_csv(prof);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,loss,R_W,R_alpha,stable_rank");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1.5,2,3,1");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0.25,2,3,1.25");
}

TEST(Io, FormatDoubleRejectsNonFinite) {
  EXPECT_EQ(ck::format_double(0.1), "0.10000000000000001");
  EXPECT_THROW(ck::format_double(INFINITY), ck::NumericError);
}

TEST(Io, FilesAndDirectories) {
  ck::testing::TempDir dir("io");
  const auto tp = ck::gen_teacher_data(4, 5, 2, 1);
  const auto path = dir.path() / "nested" / "data.json";
  ck::save_dataset(path, tp.data);
  EXPECT_EQ(ck::load_dataset(path).y, tp.data.y);
  EXPECT_THROW(ck::read_file(dir.path() / "missing.json"), ck::UsageError);
}
