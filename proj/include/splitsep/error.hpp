#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splitsep {

enum class ErrorKind {
  // input validation
  ZeroMeanViolation,
  EmptySpec,
  DuplicateHarmonic,
  NonUnitGcd,
  NotCoprime,
  InvalidArgument,
  ParseError,
  // numerical failures
  OrderExceedsBound,
  NonDecayingAverage,
  MissingMode,
  StepSizeUnderflow,
  SeedOutOfRange,
  NoPlateau,
  QuadratureBudgetExceeded,
  OrderMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroMeanViolation: return "ZeroMeanViolation";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::DuplicateHarmonic: return "DuplicateHarmonic";
    case ErrorKind::NonUnitGcd: return "NonUnitGcd";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OrderExceedsBound: return "OrderExceedsBound";
    case ErrorKind::NonDecayingAverage: return "NonDecayingAverage";
    case ErrorKind::MissingMode: return "MissingMode";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::SeedOutOfRange: return "SeedOutOfRange";
    case ErrorKind::NoPlateau: return "NoPlateau";
    case ErrorKind::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
  }
  return "Unknown";
}

/// True for errors caused by bad input rather than by a failed computation.
constexpr bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroMeanViolation:
    case ErrorKind::EmptySpec:
    case ErrorKind::DuplicateHarmonic:
    case ErrorKind::NonUnitGcd:
    case ErrorKind::NotCoprime:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace splitsep
