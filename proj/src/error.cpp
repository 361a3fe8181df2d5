#include "dcnet/error.hpp"

namespace dcnet {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AlgebraicLoop: return "AlgebraicLoop";
    case ErrorCode::PoleOnGrid: return "PoleOnGrid";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::ClosureMismatch: return "ClosureMismatch";
    case ErrorCode::UnstableLoop: return "UnstableLoop";
    case ErrorCode::ShareSumViolation: return "ShareSumViolation";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace dcnet
