#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finfactor {

enum class ErrorKind {
  DimensionMismatch,
  DimensionOverflow,
  NotSelfAdjoint,
  SystemTooSmall,
  SupportMismatch,
  NotDivisible,
  UnknownStrategy,
  SizeMismatch,
  RankMismatch,
  FactorTooSmall,
  IndexTooLarge,
  SupportTooLarge,
  InconsistentAssignment,
  NumericalFailure,
  InvalidArgument,
  ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimensionOverflow: return "DimensionOverflow";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::SystemTooSmall: return "SystemTooSmall";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::UnknownStrategy: return "UnknownStrategy";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::FactorTooSmall: return "FactorTooSmall";
    case ErrorKind::IndexTooLarge: return "IndexTooLarge";
    case ErrorKind::SupportTooLarge: return "SupportTooLarge";
    case ErrorKind::InconsistentAssignment: return "InconsistentAssignment";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace finfactor
