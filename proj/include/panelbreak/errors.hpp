#pragma once

#include <stdexcept>
#include <string>

namespace panelbreak {

// Precondition violations: bad dimensions, non-finite data, out-of-range
// parameters. The message names the offending argument.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// An algorithm failed to converge or produced a non-finite intermediate.
// The message names the computation stage that failed.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file. Carries the 1-based line number when known (0 when
// the problem is not tied to a single line, e.g. an empty file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace panelbreak
