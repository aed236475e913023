#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dval/poly.hpp"

namespace dval {

/// Homogeneous polynomial of total degree exactly r in n variables with at
/// most `budget` terms and small nonzero integer coefficients.
XPoly random_form(std::size_t n, unsigned r, std::size_t budget, std::uint64_t seed);

/// Small nonzero random element of K_n: a quotient of sparse polynomials of
/// total degree <= max_degree.
KElem random_kelem(std::size_t n, unsigned max_degree, std::size_t terms, std::mt19937_64& rng);

/// All exponent vectors of total degree r in n variables.
std::vector<Monomial> monomials_of_degree(std::size_t n, unsigned r);

/// Derive an independent seed for sub-task `index` of a seeded computation.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

/// Truncated series in the variables Y_1..Y_n with coefficients in Delta.
/// Output only: it describes an implicit-ideal generator.
struct TruncatedXSeries {
  struct Term {
    Monomial mono;
    RatFunc coeff;
  };
  std::size_t nvars = 0;
  std::vector<Term> terms;  // grlex decreasing, nonzero coefficients
  unsigned total_degree_prec = 0;
  bool truncated = true;

  void add(const Monomial& m, const RatFunc& c);
  std::string to_string() const;
};

}  // namespace dval
