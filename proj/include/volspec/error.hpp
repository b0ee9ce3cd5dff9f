#pragma once

#include <stdexcept>
#include <string>

namespace volspec {

enum class ErrorCode {
  InvalidDimension,
  DimensionMismatch,
  InvalidParameter,
  GridMismatch,
  TooShort,
  CutoffTooLarge,
  EmptyInput,
  EvenLength,
  DegenerateVariance,
  DegenerateData,
  NonConvergence,
  Io,
  MalformedData,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures surface as this type; the code is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace volspec
