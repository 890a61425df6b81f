#pragma once

#include <stdexcept>
#include <string>

namespace renosched {

// Base class for data errors (bad files, inconsistent instances). The CLI maps
// these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Raised when no schedule satisfying the upper-level constraints can be found.
// The CLI maps this to exit code 3.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, int project = -1)
      : Error(what), project_(project) {}

  // Project that could not be placed, or -1 when not attributable.
  int project() const noexcept { return project_; }

 private:
  int project_;
};

}  // namespace renosched
