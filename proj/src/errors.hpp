#pragma once

#include <stdexcept>
#include <string>

namespace qkdrot {

// Mirrors qkd_status in the public C header; values must stay in sync.
enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  degenerate = 3,
  not_positive_definite = 4,
  parse = 5,
  consistency = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace qkdrot
