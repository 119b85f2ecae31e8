#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace teamlog {

enum class ErrorKind {
  kParse,
  kSymbol,
  kUnbound,
  kArity,
  kValidation,
  kCapture,
  kFragment,
  kBudget,
  kShape,
  kPrecondition,
  kNoUltrafilter,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Base class for every error raised by the library. The kind is what the CLI
/// reports in its machine-readable `{"error": {"kind": ..}}` object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& detail, std::size_t line, std::size_t column)
      : Error(ErrorKind::kParse, detail + " at line " + std::to_string(line) +
                                     ", column " + std::to_string(column)),
        detail_(detail),
        line_(line),
        column_(column) {}

  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

/// Raised whenever a search would exceed its configured limit. Searches never
/// truncate silently.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& detail)
      : Error(ErrorKind::kBudget, detail) {}
};

}  // namespace teamlog
