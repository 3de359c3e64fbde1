#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcx {

enum class ErrorCode {
  kNonPositiveEntry,
  kDimensionMismatch,
  kTooSmall,
  kNonPositiveParameter,
  kSingularSystem,
  kUnsupportedSize,
  kOutOfScale,
  kInvalidConfig,
  kParse,
  kNotFound,
  kStorage,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; callers
// switch on code() to map them to exit codes or HTTP statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pcx
