#ifndef GRIDRESTORE_ERRORS_HPP
#define GRIDRESTORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridrestore {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownBus : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

// Power flow failures.
class NoFrequencyAnchor : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

// Planner failures.
class NoBlackStart : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

/// Malformed case text. Carries the 1-based line number (0 when the input as
/// a whole is unusable, e.g. empty).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Well-formed case text describing an invalid network.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridrestore

#endif  // GRIDRESTORE_ERRORS_HPP
