#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace idem {

/// Bad arguments or a violated precondition (exit code 3 in the CLI).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File system failures: missing, unreadable or unwritable paths (exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line, const std::string& source = {})
      : IoError((source.empty() ? "" : source + ": ") +
                (line > 0 ? "line " + std::to_string(line) + ": " : "") + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that uses a feature this reader does not implement (binary PLY, faces, ...).
class UnsupportedFeatureError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// No pair of q_tot peaks brackets the reference cell.
class NoRoiError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Registration was started outside the region of interest.
class PreAlignmentRequiredError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace idem
