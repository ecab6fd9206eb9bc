#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etale {

enum class ErrorKind {
  MalformedSpec,
  StructureError,
  NotComposable,
  CocycleViolation,
  IncompatibleVariant,
  IncompatibleDenominator,
  ModelMismatch,
  BundleIncompatible,
  NotInterior,
  UnsupportedModel,
  EnumerationTruncated,
  ConvergenceFailure,
  NumericalRankAmbiguity,
  UnknownArrow,
  ParseError,
  ExactnessLimit,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library. `witness` carries a human-readable
// description of the offending arrows/pairs/triples when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string witness = {})
      : std::runtime_error(message), kind_(kind), witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::string witness_;
};

}  // namespace etale
