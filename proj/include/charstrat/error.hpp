#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace charstrat {

enum class ErrorCode {
  NonPrimeModulus,
  ReducibleModulus,
  InfiniteField,
  FieldMismatch,
  DimensionMismatch,
  NonzeroConstantTerm,
  EmptySample,
  BudgetExceeded,
  EmptyStratum,
  DegenerateTower,
  NonzeroConstant,
  NotCertifiedFinite,
  OrderTooLow,
  NotTruncatable,
  WrongCorank,
  TargetTooBig,
  PreconditionViolated,
  EmptyRegion,
  ParseError,
  Unsupported,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace charstrat
