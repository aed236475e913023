#pragma once

#include <stdexcept>
#include <string>

namespace dval {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input to an operation: arity mismatch, index out of range,
/// negative-degree shift, invalid permutation.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Division by zero in an exact field.
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// A rational function was evaluated where its denominator vanishes.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// invert_unit on a series whose order is not zero.
class NotUnitError : public Error {
 public:
  using Error::Error;
};

/// A leading coefficient or residue was asked of a series whose order is
/// only known as a lower bound.
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a procedure does not hold (wrong value, order
/// violation, non-zero value passed to residue, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A series that should be nonzero is indistinguishable from zero at the
/// precision cap. The element may lie in the kernel of the parametrization.
class KernelSuspicionError : public Error {
 public:
  using Error::Error;
};

/// raise_precision asked for more terms than the spec source can emit.
class PrecisionCeilingError : public Error {
 public:
  using Error::Error;
};

/// pullback through a coordinate change whose coefficient has no attached
/// K-representative.
class RepresentativeMissingError : public Error {
 public:
  using Error::Error;
};

/// An iteration cap was hit before a procedure could conclude.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Text that does not conform to one of the documented grammars.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace dval
