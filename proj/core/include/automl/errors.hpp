#pragma once

#include <stdexcept>
#include <string>

namespace automl {

// Base for all recoverable errors raised by the library. The CLI maps these
// to exit code 2; anything else escaping a command is an internal bug (exit 3).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidMaskError : public Error {
 public:
  using Error::Error;
};

class DataFormatError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class RegistrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace automl
