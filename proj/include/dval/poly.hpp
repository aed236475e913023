#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dval/errors.hpp"

namespace dval {

/// Elements of the base field k = Q.
using Rat = mpq_class;

inline constexpr std::size_t kMaxVars = 12;

/// Exponent vector with its cached total degree. Slots beyond the owning
/// polynomial's arity are always zero.
struct Monomial {
  std::array<std::uint16_t, kMaxVars> exps{};
  std::uint32_t degree = 0;

  static Monomial unit() { return {}; }
  static Monomial variable(std::size_t i, unsigned power = 1);

  Monomial operator*(const Monomial& other) const;
  bool divides(const Monomial& other) const;
  /// other / *this; requires divides(other).
  Monomial cofactor(const Monomial& other) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order with variable 1 largest: true iff a > b.
bool grlex_greater(const Monomial& a, const Monomial& b);

/// Variable families. The tag keeps parameters of Delta, coordinates of
/// K_n, and mixed scratch rings from being combined by accident.
struct ParamVars {
  static constexpr char symbol = 'T';
};
struct XVars {
  static constexpr char symbol = 'X';
};
struct MixedVars {
  static constexpr char symbol = 'V';
};

/// Sparse multivariate polynomial over Q. Terms are kept sorted in strictly
/// decreasing grlex order with no zero coefficients.
template <class Vars>
class MPoly {
 public:
  struct Term {
    Monomial mono;
    Rat coeff;
  };

  MPoly() = default;
  explicit MPoly(std::size_t nvars);

  static MPoly constant(std::size_t nvars, const Rat& c);
  /// Variable with zero-based index i.
  static MPoly variable(std::size_t nvars, std::size_t i);
  static MPoly monomial(std::size_t nvars, const Monomial& m, const Rat& c);
  /// Accepts unsorted input with repeats and zeros.
  static MPoly from_terms(std::size_t nvars, std::vector<Term> terms);

  std::size_t nvars() const noexcept { return nvars_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  bool is_monomial() const noexcept { return terms_.size() == 1; }
  Rat constant_term() const;
  /// Leading term under grlex; requires a nonzero polynomial.
  const Term& leading() const;

  int total_degree() const;
  int degree_in(std::size_t i) const;
  int min_total_degree() const;

  MPoly operator-() const;
  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly& operator*=(const MPoly& o);
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(const MPoly& a, const MPoly& b) { return a.mul(b); }
  friend bool operator==(const MPoly& a, const MPoly& b) {
    return a.nvars_ == b.nvars_ && a.same_terms(b);
  }

  MPoly scaled(const Rat& c) const;
  MPoly times_monomial(const Monomial& m, const Rat& c) const;
  MPoly pow(unsigned e) const;

  MPoly derivative(std::size_t i) const;
  Rat evaluate(std::span<const Rat> point) const;

  /// Quotient when d divides *this exactly, nullopt otherwise.
  std::optional<MPoly> divide_exact(const MPoly& d) const;
  /// Scaled so the grlex-leading coefficient is 1 (zero stays zero).
  MPoly monic() const;

  /// Replace x_i by x_i^e.
  MPoly raise_variable(std::size_t i, unsigned e) const;
  /// Same terms viewed in a ring with more (or equally many) variables,
  /// variable k mapped to slot map[k].
  template <class Other>
  MPoly<Other> embed(std::size_t nvars, std::span<const std::size_t> map) const;

  /// Canonical text of the polynomial (see Frac::to_string).
  std::string to_string() const;

 private:
  void check_same_arity(const MPoly& o) const;
  bool same_terms(const MPoly& o) const;
  MPoly mul(const MPoly& o) const;

  std::size_t nvars_ = 0;
  std::vector<Term> terms_;

  template <class>
  friend class MPoly;
};

/// Monic greatest common divisor; gcd(a, 0) = monic(a).
template <class Vars>
MPoly<Vars> gcd(const MPoly<Vars>& a, const MPoly<Vars>& b);

/// Element of the fraction field of MPoly<Vars>, kept in normal form:
/// gcd(num, den) = 1 and den monic under grlex.
template <class Vars>
class Frac {
 public:
  Frac() : Frac(std::size_t{0}) {}
  explicit Frac(std::size_t nvars);
  Frac(MPoly<Vars> p);  // NOLINT(google-explicit-constructor)
  Frac(MPoly<Vars> num, MPoly<Vars> den);

  static Frac constant(std::size_t nvars, const Rat& c);
  static Frac variable(std::size_t nvars, std::size_t i);

  std::size_t nvars() const noexcept { return num_.nvars(); }
  const MPoly<Vars>& num() const noexcept { return num_; }
  const MPoly<Vars>& den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_constant() const noexcept { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const noexcept { return den_.is_constant(); }
  Rat constant_value() const;

  Frac operator-() const;
  Frac& operator+=(const Frac& o);
  Frac& operator-=(const Frac& o);
  Frac& operator*=(const Frac& o);
  Frac& operator/=(const Frac& o);
  friend Frac operator+(Frac a, const Frac& b) { return a += b; }
  friend Frac operator-(Frac a, const Frac& b) { return a -= b; }
  friend Frac operator*(Frac a, const Frac& b) { return a *= b; }
  friend Frac operator/(Frac a, const Frac& b) { return a /= b; }
  friend bool operator==(const Frac& a, const Frac& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  Frac inverse() const;
  Frac pow(int e) const;
  Frac scaled(const Rat& c) const;

  Frac derivative(std::size_t i) const;
  /// Throws PoleError when the denominator vanishes at the point.
  Rat evaluate(std::span<const Rat> point) const;
  /// Substitute images for each variable (images.size() == nvars()).
  template <class Target>
  Frac<Target> substitute(std::span<const Frac<Target>> images) const;

  Frac raise_variable(std::size_t i, unsigned e) const;

  /// Deterministic normal form: integer coefficients, content removed,
  /// positive leading denominator coefficient, grlex term order.
  std::string to_string() const;

 private:
  void normalize();

  MPoly<Vars> num_;
  MPoly<Vars> den_;
};

using Poly = MPoly<ParamVars>;
using RatFunc = Frac<ParamVars>;
using XPoly = MPoly<XVars>;
using KElem = Frac<XVars>;

/// Named entry points matching the operations of the arithmetic kernel.
template <class Vars>
Frac<Vars> partial_derivative(const Frac<Vars>& f, std::size_t i) {
  return f.derivative(i);
}
template <class Vars>
Rat evaluate(const Frac<Vars>& f, std::span<const Rat> point) {
  return f.evaluate(point);
}
template <class Vars>
std::string canonical_string(const Frac<Vars>& f) {
  return f.to_string();
}

std::string rat_to_string(const Rat& r);

}  // namespace dval
