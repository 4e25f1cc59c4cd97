#include "osa/error.hpp"

namespace osa {

const char *to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::InvalidArgument:
    return "InvalidArgument";
  case ErrorKind::DegenerateChain:
    return "DegenerateChain";
  case ErrorKind::NoConvergence:
    return "NoConvergence";
  case ErrorKind::StateSpaceTooLarge:
    return "StateSpaceTooLarge";
  case ErrorKind::NotThreshold:
    return "NotThreshold";
  case ErrorKind::DegenerateDenominator:
    return "DegenerateDenominator";
  case ErrorKind::DelayOverflow:
    return "DelayOverflow";
  case ErrorKind::InsufficientData:
    return "InsufficientData";
  case ErrorKind::TargetUnreachable:
    return "TargetUnreachable";
  }
  return "Unknown";
}

} // namespace osa
