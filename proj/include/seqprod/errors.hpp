#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqprod {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  NotPositive,
  ShapeMismatch,
  AlgebraMismatch,
  NotEffect,
  NotProjection,
  NormTooLarge,
  NotContractive,
  NotUnital,
  Not2Positive,
  NotMutuallyInverse,
  NotMultiplicative,
  PreconditionViolated,
  NoSolution,
  NotUnimodular,
  AxiomPrereqFailed,
  UnknownName,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the contract
/// that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace seqprod
