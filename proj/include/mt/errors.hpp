// Copyright 2026 The mt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mt {

enum class ErrorKind {
  NonHermitian,
  DimensionMismatch,
  NumericalFailure,
  InvalidArgument,
  NonCommuting,
  KindMismatch,
  IndexOutOfRange,
  NotClassical,
  ScenarioInvalid,
  ConstructionFailed,
  InvalidResolution,
  UnexpectedCommutation,
  ParseError,
};

inline const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::NonHermitian: return "NonHermitian";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::NumericalFailure: return "NumericalFailure";
  case ErrorKind::InvalidArgument: return "InvalidArgument";
  case ErrorKind::NonCommuting: return "NonCommuting";
  case ErrorKind::KindMismatch: return "KindMismatch";
  case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorKind::NotClassical: return "NotClassical";
  case ErrorKind::ScenarioInvalid: return "ScenarioInvalid";
  case ErrorKind::ConstructionFailed: return "ConstructionFailed";
  case ErrorKind::InvalidResolution: return "InvalidResolution";
  case ErrorKind::UnexpectedCommutation: return "UnexpectedCommutation";
  case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library.
///
/// Errors that come from a numerical check carry the offending residual so
/// callers can report how far from the invariant the input was.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what, double residual = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind), residual_(residual) {}

  ErrorKind kind() const noexcept { return kind_; }
  double residual() const noexcept { return residual_; }

private:
  ErrorKind kind_;
  double residual_;
};

/// Raised when a product observable is requested for effects that do not
/// commute. `node()` is set when the failure happened while realizing a
/// causal tree.
class NonCommutingError : public Error {
public:
  NonCommutingError(double residual, std::string node = {})
      : Error(ErrorKind::NonCommuting,
              node.empty()
                  ? "effects do not commute (residual " +
                        std::to_string(residual) + ")"
                  : "effects do not commute at node '" + node +
                        "' (residual " + std::to_string(residual) + ")",
              residual),
        node_(std::move(node)) {}

  const std::string &node() const noexcept { return node_; }

private:
  std::string node_;
};

namespace detail {
[[noreturn]] inline void fail(ErrorKind kind, const std::string &what,
                              double residual = 0.0) {
  throw Error(kind, what, residual);
}

inline void require(bool cond, ErrorKind kind, const std::string &what,
                    double residual = 0.0) {
  if (!cond) {
    fail(kind, what, residual);
  }
}
} // namespace detail

} // namespace mt
