#include "trustmw/error.hpp"

namespace trustmw {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::unsupported: return "unsupported feature";
    case ErrorCode::not_found: return "not found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::kind: return "wrong principal kind";
    case ErrorCode::state: return "invalid state";
    case ErrorCode::mismatch: return "mismatch";
    case ErrorCode::integrity: return "integrity violation";
    case ErrorCode::validation: return "validation error";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

ParseError::ParseError(std::size_t line, std::size_t column,
                       const std::string& message)
    : Error(ErrorCode::parse, std::to_string(line) + ":" +
                                  std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace trustmw
