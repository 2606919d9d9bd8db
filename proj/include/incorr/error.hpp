#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace incorr {

enum class ErrorCode {
  TooFewPoints,
  DegenerateGeometry,
  DuplicateHeight,
  DuplicatePick,
  UnknownStratum,
  UnknownRockType,
  UnknownMeasurement,
  NonLeafTarget,
  UnknownCorrelation,
  UnknownLog,
  UnknownContact,
  NotAPermutation,
  InvalidCorrelation,
  PickOutOfTolerance,
  ContactInUse,
  ParseError,
  SchemaError,
  ValidationError,
  DanglingReference,
  StaleRevision,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code and,
// where one exists, the id of the offending object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace incorr
