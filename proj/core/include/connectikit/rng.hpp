// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace connectikit {

/// Counter-based generator: the k-th draw is mix64(key + k * 0x9E3779B97F4A7C15),
/// where mix64 is the SplitMix64 finalizer. State is (key, counter), so a stream
/// is fully described by its key and how many words have been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  /// Independent stream keyed by (this key, name).
  [[nodiscard]] Rng substream(std::string_view name) const;
  [[nodiscard]] Rng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller, consuming two words per call.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace connectikit
