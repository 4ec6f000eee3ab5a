#pragma once

#include <stdexcept>
#include <string>

namespace reconbound {

enum class ErrorCode {
  invalid_argument,
  unbounded_domain,
  size_guard,
  missing_alpha,
  unsupported_family,
  non_convergence,
  step_size,
  degenerate_dimension,
  no_root,
  near_zero_gradient,
  all_failed,
  budget_exceeded,
  enumeration_cap,
  wrong_arity,
  bad_format,
  digit_absent,
  config,
  io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace reconbound
