#pragma once

#include <stdexcept>
#include <string>

namespace treesne {

// Base for all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside an optimization or solver.
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace treesne
