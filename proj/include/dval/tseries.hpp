#pragma once

#include <map>
#include <string>

#include "dval/poly.hpp"

namespace dval {

/// v(f) as far as the working precision can tell.
struct Value {
  enum class Tag { Exact, AtLeast };
  Tag tag = Tag::Exact;
  long amount = 0;
  /// Set when escalation ran out: the element may lie in ker(Psi).
  bool kernel_suspect = false;

  static Value exact(long a) { return {Tag::Exact, a, false}; }
  static Value at_least(long a, bool suspect = false) { return {Tag::AtLeast, a, suspect}; }

  bool is_exact() const noexcept { return tag == Tag::Exact; }
  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;
};

/// Truncated series sum_d c_d t^d with RatFunc coefficients. Coefficients
/// of degree >= prec() are unknown. A series built from finitely many known
/// terms can be marked exact (prec() == kExactPrec); it then behaves as a
/// polynomial in t. Degrees may be negative (quotients inside eval_psi).
class TSeries {
 public:
  static constexpr long kExactPrec = 1L << 40;

  TSeries() = default;
  TSeries(std::size_t nparams, long prec);

  static TSeries zero(std::size_t nparams, long prec) { return TSeries(nparams, prec); }
  static TSeries constant(const RatFunc& c, long prec = kExactPrec);
  static TSeries monomial(const RatFunc& c, long degree, long prec = kExactPrec);
  /// Terms at or above prec are dropped; zero coefficients skipped.
  static TSeries from_terms(std::size_t nparams, const std::map<long, RatFunc>& terms, long prec);

  std::size_t nparams() const noexcept { return nparams_; }
  long prec() const noexcept { return prec_; }
  bool is_exact() const noexcept { return prec_ >= kExactPrec; }
  const std::map<long, RatFunc>& terms() const noexcept { return terms_; }
  RatFunc coeff(long degree) const;

  /// Lowest degree that may carry a nonzero coefficient.
  long order_bound() const noexcept;

  TSeries operator-() const;
  friend TSeries operator+(const TSeries& a, const TSeries& b);
  friend TSeries operator-(const TSeries& a, const TSeries& b);
  friend TSeries operator*(const TSeries& a, const TSeries& b);
  TSeries scaled(const RatFunc& c) const;
  TSeries pow(unsigned e) const;

  /// Drop everything at or above degree p (p may exceed the current prec,
  /// in which case nothing changes).
  TSeries truncated(long p) const;
  /// Multiply by t^d without any sign restriction.
  TSeries times_t(long d) const;

  /// Exact structural equality including precision.
  friend bool operator==(const TSeries& a, const TSeries& b);

  std::string to_string() const;

 private:
  void check(const TSeries& o) const;

  std::size_t nparams_ = 0;
  long prec_ = 0;
  std::map<long, RatFunc> terms_;
};

Value ord(const TSeries& a);
/// Inverse of a series of order exactly 0. Exact units with more than one
/// term are inverted to `target_prec` terms.
TSeries invert_unit(const TSeries& a, long target_prec = 0);
/// Multiply by t^d; refuses to create negative degrees.
TSeries shift(const TSeries& a, long d);
RatFunc leading_coeff(const TSeries& a);

}  // namespace dval
