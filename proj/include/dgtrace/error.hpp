#pragma once

#include <stdexcept>
#include <string>

namespace dgtrace {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed user input (CSV, JSON, command arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

// Module header missing or malformed; the unit cannot be identified.
class FatalSyntax : public Error {
 public:
  using Error::Error;
};

// No terminal node matched any slice target.
class EmptySlice : public Error {
 public:
  using Error::Error;
};

class EmptyGraph : public Error {
 public:
  using Error::Error;
};

// The non-backtracking matrix is nilpotent (no non-backtracking cycles).
class ZeroSpectralRadius : public Error {
 public:
  using Error::Error;
};

// Logistic regression labels contain a single class.
class DegenerateLabels : public Error {
 public:
  using Error::Error;
};

}  // namespace dgtrace
