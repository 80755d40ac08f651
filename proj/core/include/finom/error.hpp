#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finom {

enum class ErrorCode {
  EmptyInput,
  DuplicateNode,
  UnsortedInput,
  NonFiniteCoordinate,
  InvalidArgument,
  ZeroMass,
  ParseError,
  ValidationError,
  DimensionMismatch,
  InvalidEpsilon,
  NonFiniteInput,
  SizeCapExceeded,
  NonFiniteIterate,
  ZeroDenominator,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the kind of failure without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace finom
