#pragma once

#include <stdexcept>
#include <string>

namespace linkstat {

/// The balance system (or one of its coefficients) has a vanishing denominator
/// or determinant at the requested point.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A force query was made at a direction in which the links do not open.
class NotOpeningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint coordinates could not be made consistent with the given lengths/angles.
class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed parameter or measurement text. `line()` is 1-based, 0 when the
/// error is not tied to a line (e.g. a missing section).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linkstat
