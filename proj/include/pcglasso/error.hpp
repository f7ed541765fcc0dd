#pragma once

#include <stdexcept>
#include <string>

namespace pcglasso {

/// Failure categories. The CLI maps each one onto a distinct exit code.
enum class ErrorKind {
  usage,          // bad flags or malformed configuration
  parse,          // unreadable or malformed input file
  rejected_input, // input violates a numeric precondition (non-PD, zero variance, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void reject(const std::string& what) { throw Error(ErrorKind::rejected_input, what); }
[[noreturn]] inline void bad_config(const std::string& what) { throw Error(ErrorKind::usage, what); }
[[noreturn]] inline void bad_parse(const std::string& what) { throw Error(ErrorKind::parse, what); }

}  // namespace pcglasso
