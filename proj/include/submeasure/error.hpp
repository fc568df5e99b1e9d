#pragma once

#include <stdexcept>
#include <string>

namespace submeasure {

enum class ErrorCode {
  kSpaceMismatch,
  kInvalidModel,
  kInvalidArgument,
  kNotPositive,
  kPrecondition,
  kNonConvergence,
  kUnboundedNorm,
  kTooLarge,
  kSchema,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSpaceMismatch: return "space_mismatch";
    case ErrorCode::kInvalidModel: return "invalid_model";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotPositive: return "not_positive";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kUnboundedNorm: return "unbounded_norm";
    case ErrorCode::kTooLarge: return "too_large";
    case ErrorCode::kSchema: return "schema";
  }
  return "unknown";
}

/// Base error for every failure raised by the library. `where` carries a
/// JSON path or an operation-stage locator.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string where = {})
      : std::runtime_error(where.empty() ? message : where + ": " + message),
        code_(code),
        where_(std::move(where)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::string where_;
};

}  // namespace submeasure
