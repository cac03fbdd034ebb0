#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trustmw {

enum class ErrorCode {
  invalid_argument,
  parse,
  unsupported,
  not_found,
  conflict,
  kind,
  state,
  mismatch,
  integrity,
  validation,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Syntax errors carry a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace trustmw
