#include "hexcone/core.hpp"

namespace hexcone {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedAction: return "MalformedAction";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SymmetryValidationError: return "SymmetryValidationError";
    case ErrorCode::ConjugationMismatch: return "ConjugationMismatch";
    case ErrorCode::NotAFixedPoint: return "NotAFixedPoint";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::WrongSymmetryKind: return "WrongSymmetryKind";
    case ErrorCode::NoCenterVertex: return "NoCenterVertex";
    case ErrorCode::MultiplicityMismatch: return "MultiplicityMismatch";
    case ErrorCode::RotationFixesEigenspace: return "RotationFixesEigenspace";
    case ErrorCode::DegenerateOnContour: return "DegenerateOnContour";
    case ErrorCode::LowOverlap: return "LowOverlap";
    case ErrorCode::NotEigenvectorOfInvolution: return "NotEigenvectorOfInvolution";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedAction:
    case ErrorCode::UnknownPreset:
    case ErrorCode::ParseError:
    case ErrorCode::SymmetryValidationError:
    case ErrorCode::NotAFixedPoint:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace hexcone
