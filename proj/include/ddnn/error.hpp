#pragma once

#include <stdexcept>
#include <string>

namespace ddnn {

enum class ErrorCode {
  kInvalidArchitecture,
  kShapeMismatch,
  kInvalidPartition,
  kInvalidCount,
  kOutOfDomain,
  kEmptyData,
  kEmptySubdomain,
  kInconsistentInterface,
  kInvalidInterface,
  kNumericalFailure,
  kLineSearchFailure,
  kLmaStall,
  kParseError,
  kIoError,
  kInvalidConfig,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace ddnn
