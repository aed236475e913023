#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "dval/poly.hpp"

namespace dval::text {

/// Syntax tree of the textual rational-expression grammar.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' exponent)?
///   primary := integer | T<i> | X<i> | Y<i> | '(' expr ')'
///   exponent:= integer | '-' integer | '(' ['-'] integer ['/' integer] ')'
///
/// Canonical strings produced by Frac::to_string are a subset of this
/// language. Fractional exponents are only meaningful on a bare parameter
/// and must be cleared by a ramification before evaluation.
struct Expr {
  enum class Kind { Number, Var, Add, Sub, Mul, Div, Neg, Pow };
  Kind kind = Kind::Number;
  mpz_class number;
  char symbol = 0;
  std::size_t index = 0;  // zero-based
  Rat exponent;
  std::shared_ptr<const Expr> lhs, rhs;
};
using ExprPtr = std::shared_ptr<const Expr>;

/// Parse a complete expression; errors carry line and column (the column of
/// the first character of `text` is column_offset + 1).
ExprPtr parse(std::string_view text, int line = 1, int column_offset = 0);

std::string print(const ExprPtr& e);

/// Replace every occurrence of parameter T<index+1> by S^e, where S takes
/// over the same slot: bare T becomes T^e and T^q becomes T^(q*e).
ExprPtr ramify(const ExprPtr& e, std::size_t index, unsigned factor);

/// True when T<index+1> occurs in the tree.
bool mentions(const ExprPtr& e, char symbol, std::size_t index);

/// Evaluate into a fraction field. `symbol` is the accepted variable letter
/// ('Y' is accepted as an alias of 'X').
template <class Vars>
Frac<Vars> evaluate(const ExprPtr& e, std::size_t nvars, int line = 1);

RatFunc parse_ratfunc(std::string_view text, std::size_t nparams);
KElem parse_kelem(std::string_view text, std::size_t nvars);

}  // namespace dval::text
