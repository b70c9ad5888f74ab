#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skt {

enum class ErrorCode {
  NonPositiveDiffusion,
  NegativeRate,
  InvalidGrid,
  NegativeInitialData,
  NonPositiveWidth,
  NonPositiveRadicand,
  NonFiniteState,
  InvalidSolverConfig,
  CFLViolation,
  NoConvergence,
  GridMismatch,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the documented failure kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the explicit FD step; carries the largest admissible step.
class CflViolation : public Error {
 public:
  CflViolation(double requested, double admissible);

  double requested() const noexcept { return requested_; }
  double admissible() const noexcept { return admissible_; }

 private:
  double requested_;
  double admissible_;
};

}  // namespace skt
