#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcong {

enum class ErrorKind {
  parse,       // malformed text input
  duplicate,   // repeated entity name
  reference,   // reference to an unknown entity
  validation,  // well-formed data violating an invariant
  format,      // binary magic/version/size mismatch
  invalid_input,
  numeric,     // solver failed to converge
  io,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the toolkit. The CLI maps the kind onto
/// process exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace netcong
