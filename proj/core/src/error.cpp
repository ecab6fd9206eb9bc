#include "etale/error.hpp"

namespace etale {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedSpec: return "MalformedSpec";
    case ErrorKind::StructureError: return "StructureError";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::CocycleViolation: return "CocycleViolation";
    case ErrorKind::IncompatibleVariant: return "IncompatibleVariant";
    case ErrorKind::IncompatibleDenominator: return "IncompatibleDenominator";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::BundleIncompatible: return "BundleIncompatible";
    case ErrorKind::NotInterior: return "NotInterior";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::EnumerationTruncated: return "EnumerationTruncated";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NumericalRankAmbiguity: return "NumericalRankAmbiguity";
    case ErrorKind::UnknownArrow: return "UnknownArrow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ExactnessLimit: return "ExactnessLimit";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace etale
