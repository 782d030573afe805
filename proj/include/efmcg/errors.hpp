#pragma once

#include <stdexcept>
#include <string>

namespace efmcg {

// Base for every error the library raises. Callers that only need to
// separate "bad input" from "solver trouble" can catch the two middle
// classes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what, const std::string& file = {})
      : InputError((file.empty() ? "line " : file + ":") + std::to_string(line) + ": " + what),
        line_(line),
        detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Raised when a priced column duplicates one already in the master.
class StallError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Enumeration refused or aborted because a size/time limit was hit.
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace efmcg
