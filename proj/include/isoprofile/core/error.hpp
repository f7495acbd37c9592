#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isoprofile {

enum class ErrorKind {
  OutOfChart,
  DegenerateMetric,
  GeodesicEscapedChart,
  StepCountExceeded,
  RhsNotInRange,
  DegenerateInducedMetric,
  NoConvergence,
  RadiusTooLarge,
  VolumeOutOfRange,
  DegeneratePosition,
  NotNormalized,
  SyntaxError,
  UnknownIdentifier,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parser errors additionally carry the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, const std::string& message, std::size_t position)
      : Error(kind, message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace isoprofile
