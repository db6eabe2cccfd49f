#pragma once

#include <stdexcept>
#include <string>

namespace osmot {

/// Base class for all library errors. Each subclass maps onto one failure
/// category that callers (and the CLI exit codes) distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class SequencingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& detail, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + detail), detail_(detail), line_(line) {}
  ParseError(const std::string& file, const std::string& detail, std::size_t line)
      : Error(file + ":" + std::to_string(line) + ": " + detail), detail_(detail), line_(line) {}

  const std::string& detail() const { return detail_; }
  std::size_t line() const { return line_; }

 private:
  std::string detail_;
  std::size_t line_;
};

/// Raised for unreadable/unwritable files; distinct from content errors.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace osmot
