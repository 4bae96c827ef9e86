// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twosided {

enum class ErrorKind {
  DimensionMismatch,
  InvalidInput,
  LengthExceeded,
  ZeroOperator,
  PreconditionViolated,
  BoundViolated,
  NotCauchy,
  InvalidComplex,
  ValidationError,
  VanishingFibre,
  LengthMismatch,
  IndependenceLost,
  NotASubcomplex,
  NotRankOne,
  OverlapTooSmall,
  MarginTooSmall,
  NontrivialClass,
  CoverDoesNotSpan,
  SpanNotLine,
  ObstructedOnCompact,
  EpsTooLarge,
  InnerProductVanished,
  SizeCap,
  UnsupportedTail,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::LengthExceeded: return "LengthExceeded";
    case ErrorKind::ZeroOperator: return "ZeroOperator";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::NotCauchy: return "NotCauchy";
    case ErrorKind::InvalidComplex: return "InvalidComplex";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::VanishingFibre: return "VanishingFibre";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IndependenceLost: return "IndependenceLost";
    case ErrorKind::NotASubcomplex: return "NotASubcomplex";
    case ErrorKind::NotRankOne: return "NotRankOne";
    case ErrorKind::OverlapTooSmall: return "OverlapTooSmall";
    case ErrorKind::MarginTooSmall: return "MarginTooSmall";
    case ErrorKind::NontrivialClass: return "NontrivialClass";
    case ErrorKind::CoverDoesNotSpan: return "CoverDoesNotSpan";
    case ErrorKind::SpanNotLine: return "SpanNotLine";
    case ErrorKind::ObstructedOnCompact: return "ObstructedOnCompact";
    case ErrorKind::EpsTooLarge: return "EpsTooLarge";
    case ErrorKind::InnerProductVanished: return "InnerProductVanished";
    case ErrorKind::SizeCap: return "SizeCap";
    case ErrorKind::UnsupportedTail: return "UnsupportedTail";
  }
  return "Unknown";
}

/// Library exception. `where` carries the offending simplex / stage indices
/// when the failure is localized (vertex, edge, triangle or stage number).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::vector<std::size_t> where = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        where_(std::move(where)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::vector<std::size_t> where_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::vector<std::size_t> where = {}) {
  throw Error(kind, message, std::move(where));
}

}  // namespace twosided
