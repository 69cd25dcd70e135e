#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace equinet {

enum class ErrorCode {
  // ingest
  FileNotFound,
  MissingColumn,
  RowInvariantViolation,
  UnparsableValue,
  InvalidWindow,
  // graph
  EdgeEndpointUnknown,
  SelfLoop,
  EmptyGraph,
  NoConvergence,
  InvalidAssignment,
  SingleClass,
  // layout
  NonFiniteForce,
  MissingPosition,
  // econometrics
  ZeroVariance,
  EmptyJoin,
  RankDeficient,
  TooFewObservations,
  NonPositiveWeight,
  OrderCondition,
  ZeroQuadratic,
  UnknownField,
  // pipeline
  ConfigInvalid,
  StageFailed,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is
/// what callers (and tests) dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures carry the 1-based line number of the offending row
/// (the header is line 1).
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::string path, std::size_t line,
             const std::string& detail)
      : Error(code, path + ":" + std::to_string(line) + ": " + detail),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace equinet
