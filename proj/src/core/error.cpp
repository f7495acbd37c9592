#include "isoprofile/core/error.hpp"

namespace isoprofile {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::GeodesicEscapedChart: return "GeodesicEscapedChart";
    case ErrorKind::StepCountExceeded: return "StepCountExceeded";
    case ErrorKind::RhsNotInRange: return "RhsNotInRange";
    case ErrorKind::DegenerateInducedMetric: return "DegenerateInducedMetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorKind::VolumeOutOfRange: return "VolumeOutOfRange";
    case ErrorKind::DegeneratePosition: return "DegeneratePosition";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace isoprofile
