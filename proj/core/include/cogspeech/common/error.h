#ifndef COGSPEECH_COMMON_ERROR_H_
#define COGSPEECH_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace cogspeech {

// Root of every exception thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable input files.
class InputError : public Error {
 public:
  using Error::Error;
};

// External diarizer invocation failed.
class AdapterError : public Error {
 public:
  using Error::Error;
};

}  // namespace cogspeech

#endif  // COGSPEECH_COMMON_ERROR_H_
