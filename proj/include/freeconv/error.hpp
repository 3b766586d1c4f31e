#pragma once

#include <stdexcept>
#include <string>

namespace freeconv {

// Numeric values are part of the C ABI (see freeconv.h); do not renumber.
enum class ErrorCode : int {
  invalid_parameter = 1,
  nonpositive_imaginary_part = 2,
  unsupported_order = 3,
  max_iterations_exceeded = 4,
  singular_jacobian = 5,
  domain_escape = 6,
  solver_failure = 7,
  rank_deficiency = 8,
  eigensolver_failure = 9,
  parse_error = 10,
  io_error = 11,
};

const char* to_string(ErrorCode code) noexcept;

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

}  // namespace freeconv
