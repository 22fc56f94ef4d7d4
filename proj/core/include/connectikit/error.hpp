// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace connectikit {

/// Coarse classification used by front ends to pick an exit status.
enum class ErrorKind {
  Usage,         ///< malformed input: shapes, ranges, unknown names
  Numeric,       ///< divergence, non-convergence, singular systems
  Precondition,  ///< a theorem's hypothesis does not hold for the input
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

}  // namespace connectikit
