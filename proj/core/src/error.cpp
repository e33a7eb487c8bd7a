#include "agd/error.hpp"

namespace agd {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::MalformedFamily: return "MALFORMED_FAMILY";
    case ErrorCode::EmptyOperator: return "EMPTY_OPERATOR";
    case ErrorCode::EmptySpectrum: return "EMPTY_SPECTRUM";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::FamilyNotClosed: return "FAMILY_NOT_CLOSED";
    case ErrorCode::CircleHitsSpectrum: return "CIRCLE_HITS_SPECTRUM";
    case ErrorCode::IllConditionedSplit: return "ILL_CONDITIONED_SPLIT";
    case ErrorCode::IndexTooLarge: return "INDEX_TOO_LARGE";
    case ErrorCode::NotInvertible: return "NOT_INVERTIBLE";
    case ErrorCode::NotDrazinInvertible: return "NOT_DRAZIN_INVERTIBLE";
    case ErrorCode::NotGDInvertible: return "NOT_GD_INVERTIBLE";
    case ErrorCode::NotAGDInvertible: return "NOT_AGD_INVERTIBLE";
    case ErrorCode::CutInvalid: return "CUT_INVALID";
    case ErrorCode::CutUnsupported: return "CUT_UNSUPPORTED";
    case ErrorCode::CertificateInvalid: return "CERTIFICATE_INVALID";
    case ErrorCode::ComputationLimit: return "COMPUTATION_LIMIT";
    case ErrorCode::UnknownCommand: return "UNKNOWN_COMMAND";
    case ErrorCode::UsageError: return "USAGE_ERROR";
  }
  return "UNKNOWN";
}

bool is_mathematical(ErrorCode code) {
  switch (code) {
    case ErrorCode::CircleHitsSpectrum:
    case ErrorCode::IllConditionedSplit:
    case ErrorCode::IndexTooLarge:
    case ErrorCode::NotInvertible:
    case ErrorCode::NotDrazinInvertible:
    case ErrorCode::NotGDInvertible:
    case ErrorCode::NotAGDInvertible:
    case ErrorCode::CutInvalid:
    case ErrorCode::CertificateInvalid:
      return true;
    default:
      return false;
  }
}

}  // namespace agd
