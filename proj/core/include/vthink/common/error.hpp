#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vthink {

/// Root of every exception thrown by the harness.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An error carrying a module-specific code enum. Each module defines its own
/// enum and a `to_string` overload for it.
template <typename Code>
class CodedError : public Error {
 public:
  CodedError(Code code, const std::string& message) : Error(message), code_(code) {}

  [[nodiscard]] Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace vthink
