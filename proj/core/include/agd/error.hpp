#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agd {

enum class ErrorCode {
  ParseError,
  MalformedFamily,
  EmptyOperator,
  EmptySpectrum,
  ShapeMismatch,
  FamilyNotClosed,
  CircleHitsSpectrum,
  IllConditionedSplit,
  IndexTooLarge,
  NotInvertible,
  NotDrazinInvertible,
  NotGDInvertible,
  NotAGDInvertible,
  CutInvalid,
  CutUnsupported,
  CertificateInvalid,
  ComputationLimit,
  UnknownCommand,
  UsageError,
};

// Upper snake case name used in machine reports, e.g. NOT_GD_INVERTIBLE.
std::string_view code_name(ErrorCode code);

// True for failures that express a mathematical impossibility rather than bad input.
bool is_mathematical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agd
