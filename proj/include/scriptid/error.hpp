#pragma once

#include <stdexcept>
#include <string>

namespace scriptid {

// Base of every error the library throws. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// File was readable but its contents are not a supported format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// An argument violates an operation's precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Histogram or dataset has too little variety for the operation
// (single occupied gray bin, single class).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A sample carries invalid data (non-finite feature, unknown label).
class DataError : public Error {
 public:
  using Error::Error;
};

// A class has fewer samples than the requested number of folds.
class StratificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace scriptid
