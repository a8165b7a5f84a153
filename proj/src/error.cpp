#include "gapbound/error.hpp"

namespace gapbound {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::RootNotFound: return "RootNotFound";
    case ErrorKind::InvalidTestFunction: return "InvalidTestFunction";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NonPositiveWeights: return "NonPositiveWeights";
    case ErrorKind::DegenerateQ: return "DegenerateQ";
    case ErrorKind::MissingBoundaryValue: return "MissingBoundaryValue";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EigensolveFailure: return "EigensolveFailure";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
  }
  return "Unknown";
}

}  // namespace gapbound
