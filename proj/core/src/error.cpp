#include "finom/error.hpp"

namespace finom {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace finom
