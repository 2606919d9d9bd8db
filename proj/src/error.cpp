#include "incorr/error.hpp"

namespace incorr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DuplicateHeight: return "DuplicateHeight";
    case ErrorCode::DuplicatePick: return "DuplicatePick";
    case ErrorCode::UnknownStratum: return "UnknownStratum";
    case ErrorCode::UnknownRockType: return "UnknownRockType";
    case ErrorCode::UnknownMeasurement: return "UnknownMeasurement";
    case ErrorCode::NonLeafTarget: return "NonLeafTarget";
    case ErrorCode::UnknownCorrelation: return "UnknownCorrelation";
    case ErrorCode::UnknownLog: return "UnknownLog";
    case ErrorCode::UnknownContact: return "UnknownContact";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::PickOutOfTolerance: return "PickOutOfTolerance";
    case ErrorCode::ContactInUse: return "ContactInUse";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::StaleRevision: return "StaleRevision";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace incorr
