#pragma once

#include <stdexcept>
#include <string>

namespace spidertr {

enum class ErrorKind {
  Precondition,  // malformed input, shape mismatch, invalid parameters
  CapExceeded,   // exhaustive enumeration requested above the configured cap
};

class SpiderError : public std::runtime_error {
 public:
  SpiderError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw SpiderError(ErrorKind::Precondition, what);
}

[[noreturn]] inline void fail_cap(const std::string& what) {
  throw SpiderError(ErrorKind::CapExceeded, what);
}

}  // namespace spidertr
