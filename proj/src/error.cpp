#include "volspec/error.hpp"

namespace volspec {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::CutoffTooLarge: return "CutoffTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EvenLength: return "EvenLength";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedData: return "MalformedData";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace volspec
