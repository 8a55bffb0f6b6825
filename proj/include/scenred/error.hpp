#pragma once

#include <stdexcept>
#include <string>

namespace scenred {

/// Every failure mode the library reports. The CLI maps kinds to exit
/// categories: usage errors are caught by the argument parser, data errors
/// exit 2, numeric failures exit 3.
enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NegativeProbability,
  ProbabilitySumOutOfTolerance,
  NonFiniteValue,
  EmptyGrid,
  AllZeroProbabilityRow,
  EmptyCorpus,
  LengthMismatch,
  HorizonMismatch,
  EmptyReducedSet,
  TargetTooLarge,
  EmptyKeptSet,
  IndexOutOfRange,
  UnknownMethod,
  ShapeMismatch,
  WidthNotDivisible,
  MissingForwardCache,
  UninitializedGradient,
  SizeNotFactor,
  EvenFilterWidth,
  NonFiniteLoss,
  InvalidWindow,
  InconsistentCorpus,
  Io,
  ParseError,
  HeaderMismatch,
  FormatVersionMismatch,
  ChecksumMismatch,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::ProbabilitySumOutOfTolerance: return "ProbabilitySumOutOfTolerance";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::AllZeroProbabilityRow: return "AllZeroProbabilityRow";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::EmptyReducedSet: return "EmptyReducedSet";
    case ErrorKind::TargetTooLarge: return "TargetTooLarge";
    case ErrorKind::EmptyKeptSet: return "EmptyKeptSet";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UnknownMethod: return "UnknownMethod";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::WidthNotDivisible: return "WidthNotDivisible";
    case ErrorKind::MissingForwardCache: return "MissingForwardCache";
    case ErrorKind::UninitializedGradient: return "UninitializedGradient";
    case ErrorKind::SizeNotFactor: return "SizeNotFactor";
    case ErrorKind::EvenFilterWidth: return "EvenFilterWidth";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::InconsistentCorpus: return "InconsistentCorpus";
    case ErrorKind::Io: return "Io";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::HeaderMismatch: return "HeaderMismatch";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

/// Exit category for CLI error reporting: 3 for numeric failures, 2 otherwise.
inline int exit_category(ErrorKind kind) {
  return kind == ErrorKind::NonFiniteLoss ? 3 : 2;
}

}  // namespace scenred
