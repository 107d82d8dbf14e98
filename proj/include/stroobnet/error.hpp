#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stroobnet {

enum class ErrorCode {
  OutOfRange,
  NonFinite,
  ValidationError,
  DuplicateId,
  EmptyInput,
  KindMismatch,
  DimensionMismatch,
  NoCandidates,
  BadK,
  NoClusters,
  NothingUnobserved,
  UnknownStrategy,
  StateMismatch,
  MissingColumn,
  Unreadable,
  ImpossibleSpec,
  EmptyBefore,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::NoClusters: return "NoClusters";
    case ErrorCode::NothingUnobserved: return "NothingUnobserved";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::StateMismatch: return "StateMismatch";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::Unreadable: return "Unreadable";
    case ErrorCode::ImpossibleSpec: return "ImpossibleSpec";
    case ErrorCode::EmptyBefore: return "EmptyBefore";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Process exit status for an error surfaced through the CLI:
/// 2 input error, 3 config error, 4 internal invariant violation.
constexpr int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ValidationError:
    case ErrorCode::UnknownStrategy:
    case ErrorCode::BadK:
    case ErrorCode::ImpossibleSpec:
      return 3;
    case ErrorCode::KindMismatch:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvariantViolation:
      return 4;
    default:
      return 2;
  }
}

/// The single exception type thrown by the library. `detail` names the
/// offending field or value (e.g. "lat", "longitude", "observers").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail)
      : std::runtime_error(std::string(to_string(code)) + "(" + detail + ")"),
        code_(code),
        detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace stroobnet
