#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmc {

enum class ErrorCode {
  kUnboundVariable,
  kTypeMismatch,
  kUnknownFunction,
  kNonBoolAtom,
  kMissingBinding,
  kArityMismatch,
  kUndeclaredKVar,
  kUnresolvedKVar,
  kMissingKVar,
  kIllFormed,
  kParse,
  kIo,
  kSolverUnavailable,
  kSolverProtocol,
};

const char* to_string(ErrorCode code);

// Base exception for everything the library reports. The code lets callers
// (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& expected)
      : Error(ErrorCode::kParse, format(line, column, expected)),
        line_(line),
        column_(column),
        expected_(expected) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  static std::string format(std::size_t line, std::size_t column,
                            const std::string& expected) {
    return std::to_string(line) + ":" + std::to_string(column) +
           ": expected " + expected;
  }

  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

}  // namespace hmc
