// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "connectikit/paths.hpp"
#include "connectikit/relu_net.hpp"

namespace connectikit {

using MetaValue = std::variant<double, std::string, bool>;
using Meta = std::map<std::string, MetaValue>;

struct Checkpoint {
  TwoLayerNet net;
  Meta meta;
};

// Text formats are JSON objects. Numbers are written with 17 significant digits so a
// write/read round trip is bit-exact.
//   checkpoint: {"d", "m", "W": d rows of m entries, "alpha": m entries, "meta": {...}}
//   dataset:    {"n", "d", "X": n rows of d entries, "y": n entries}
//   path:       {"segments": [{"kind", "reversed", "i", "j", "targets", "groups", "base", "other"}]}
// Readers throw UsageError on malformed input.

std::string checkpoint_to_text(const Checkpoint& ckpt);
Checkpoint checkpoint_from_text(const std::string& text);
std::string dataset_to_text(const Dataset& data);
Dataset dataset_from_text(const std::string& text);
std::string path_to_text(const PiecewisePath& path);
PiecewisePath path_from_text(const std::string& text);

/// Header t,loss,R_W,R_alpha,stable_rank.
std::string profile_to_csv(const PathProfile& profile);

std::string read_file(const std::filesystem::path& p);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& p, const std::string& content);

void save_checkpoint(const std::filesystem::path& p, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& p);
void save_dataset(const std::filesystem::path& p, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& p);

/// %.17g formatting.
std::string format_double(double v);

}  // namespace connectikit
