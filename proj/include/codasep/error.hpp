#pragma once

#include <stdexcept>
#include <string>

namespace codasep {

// Validation errors are caller mistakes (bad input, violated preconditions);
// io errors come from the filesystem; runtime errors are numerical or
// internal failures.
enum class ErrorKind { validation, io, runtime };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& what) {
  throw Error(ErrorKind::validation, what);
}

[[noreturn]] inline void fail_io(const std::string& what) { throw Error(ErrorKind::io, what); }

[[noreturn]] inline void fail_runtime(const std::string& what) {
  throw Error(ErrorKind::runtime, what);
}

}  // namespace codasep
