#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridspec {

enum class ErrorCode {
  // network construction and comparison
  DisconnectedGraph,
  UnknownBus,
  DuplicateBus,
  DuplicateLine,
  SelfLoop,
  NonPositiveInertia,
  NegativeDamping,
  NonPositiveRating,
  NegativeSusceptance,
  BusSetMismatch,
  NotComparable,
  // numerics
  ConvergenceFailure,
  DimensionMismatch,
  NonUniformDampingRatio,
  CriticalDamping,
  ZeroDamping,
  IndexOutOfRange,
  PoleEvaluation,
  ZeroEigenvalue,
  NonPositiveBand,
  DomainError,
  NonFiniteState,
  EmptyWindow,
  // input files and flags
  SyntaxError,
  SchemaViolation,
  VersionUnsupported,
  MissingDynamics,
  MalformedMatrix,
  IoError,
  InvalidArgument,
};

/// Input errors come from user-supplied data or flags; numeric errors come
/// from the analysis itself. The CLI maps these to exit codes 2 and 3.
enum class ErrorCategory { Input, Numeric };

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::UnknownBus: return "UnknownBus";
    case ErrorCode::DuplicateBus: return "DuplicateBus";
    case ErrorCode::DuplicateLine: return "DuplicateLine";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NonPositiveInertia: return "NonPositiveInertia";
    case ErrorCode::NegativeDamping: return "NegativeDamping";
    case ErrorCode::NonPositiveRating: return "NonPositiveRating";
    case ErrorCode::NegativeSusceptance: return "NegativeSusceptance";
    case ErrorCode::BusSetMismatch: return "BusSetMismatch";
    case ErrorCode::NotComparable: return "NotComparable";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonUniformDampingRatio: return "NonUniformDampingRatio";
    case ErrorCode::CriticalDamping: return "CriticalDamping";
    case ErrorCode::ZeroDamping: return "ZeroDamping";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorCode::NonPositiveBand: return "NonPositiveBand";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::MissingDynamics: return "MissingDynamics";
    case ErrorCode::MalformedMatrix: return "MalformedMatrix";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonUniformDampingRatio:
    case ErrorCode::CriticalDamping:
    case ErrorCode::ZeroDamping:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::PoleEvaluation:
    case ErrorCode::ZeroEigenvalue:
    case ErrorCode::DomainError:
    case ErrorCode::NonFiniteState:
    case ErrorCode::EmptyWindow:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Input;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace gridspec
