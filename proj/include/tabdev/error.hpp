#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tabdev {

// Stable codes; the CLI prints these verbatim.
enum class ErrorCode {
  domain,
  configuration,
  degenerate,
  parse,
  factorization,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain_error";
    case ErrorCode::configuration: return "configuration_error";
    case ErrorCode::degenerate: return "degenerate_error";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::factorization: return "factorization_error";
  }
  return "unknown_error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::configuration, what) {}
};

// Raised when the statistic's scale vanishes (constant targets) or a
// population spec yields a zero denominator.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorCode::degenerate, what) {}
};

class FactorizationError : public Error {
 public:
  explicit FactorizationError(const std::string& what) : Error(ErrorCode::factorization, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(ErrorCode::parse, what), line_(line), column_(column) {}

  // 1-based; column is 0 when the error concerns a whole line.
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace tabdev
