#pragma once

#include <stdexcept>
#include <string>

namespace cubecolor {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument shape or range (k > d, wrong vector length, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateQuad : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line and the field name.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::string field, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": field '" + field + "': " + what),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

class InvalidTag : public ParseError {
 public:
  using ParseError::ParseError;
};

class MissingImage : public Error {
 public:
  using Error::Error;
};

class IncompleteGroup : public Error {
 public:
  using Error::Error;
};

class DuplicateFace : public Error {
 public:
  using Error::Error;
};

/// A cube state violating 9-stickers-per-color or distinct centers.
class InvalidRecord : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Model file with an unknown format tag or version.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace cubecolor
