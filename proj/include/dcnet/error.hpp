#pragma once

#include <stdexcept>
#include <string>

namespace dcnet {

enum class ErrorCode {
  AlgebraicLoop,
  PoleOnGrid,
  Unstable,
  OrderTooLarge,
  ClosureMismatch,
  UnstableLoop,
  ShareSumViolation,
  NumericalBlowup,
  ConfigError,
  WindowTooShort,
  ParseError,
  ValidationError,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dcnet
