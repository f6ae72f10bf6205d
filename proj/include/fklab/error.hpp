#pragma once

#include <stdexcept>
#include <string>

namespace fklab {

enum class ErrorCode {
  invalid_argument,
  invalid_domain,
  cutoff_exceeded,
  q_unsupported,
  not_on_path,
  malformed_domain,
  singular_system,
  inconsistent,
  degenerate_input,
};

/// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fklab
