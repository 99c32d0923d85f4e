#include "homog/errors.hpp"

namespace homog {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NonPositiveL: return "NonPositiveL";
    case ErrorCode::OutsideThresholdBall: return "OutsideThresholdBall";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::NonPositiveEffective: return "NonPositiveEffective";
    case ErrorCode::MismatchBeyondTolerance: return "MismatchBeyondTolerance";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::InsufficientDecades: return "InsufficientDecades";
    case ErrorCode::MeanNotZero: return "MeanNotZero";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DataError: return "DataError";
  }
  return "Unknown";
}

}  // namespace homog
