#pragma once

#include <stdexcept>
#include <string>

namespace cayleyheat {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands that do not fit together (mismatched groups, wrong lengths).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An argument outside an operation's domain (negative weight, n <= alpha, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical guard tripped: imaginary residue, divergence, enumeration blowup,
/// series truncation too coarse.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (group strings, weight files).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cayleyheat
