#include <doctest.h>

#include <random>

#include "dval/poly.hpp"
#include "dval/textform.hpp"

using namespace dval;

namespace {

RatFunc rf(const char* s, std::size_t n = 4) { return text::parse_ratfunc(s, n); }
Poly pp(const char* s, std::size_t n = 4) { return rf(s, n).num(); }

// small random rational function in 3 parameters
RatFunc random_rf(std::mt19937_64& rng, std::size_t n = 3) {
  std::uniform_int_distribution<int> coef(-3, 3), deg(0, 2), count(1, 3);
  auto poly = [&] {
    std::vector<Poly::Term> terms;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      Monomial m;
      for (std::size_t v = 0; v < n; ++v) m.exps[v] = static_cast<std::uint16_t>(deg(rng));
      for (std::size_t v = 0; v < n; ++v) m.degree += m.exps[v];
      terms.push_back({m, Rat(coef(rng))});
    }
    return Poly::from_terms(n, std::move(terms));
  };
  Poly num = poly(), den = poly();
  while (den.is_zero()) den = poly();
  return RatFunc(num, den);
}

}  // namespace

TEST_CASE("poly arithmetic") {
  CHECK((pp("T2") + pp("T3")).to_string() == "T2+T3");
  CHECK((pp("T2+1") * pp("T2-1")) == pp("T2^2-1"));
  CHECK((pp("T2*T3") * pp("T3*T4")) == pp("T2*T3^2*T4"));
  CHECK_THROWS_AS(pp("T1", 2) + pp("T1", 3), StructuralError);
}

TEST_CASE("poly gcd") {
  CHECK(gcd(pp("T2^2-1"), pp("T2-1")) == pp("T2-1"));
  CHECK(gcd(pp("T2"), pp("T3")) == pp("1"));
  CHECK(gcd(pp("T2^2*T3+T2*T3^2"), pp("T2*T3")) == pp("T2*T3"));
  CHECK(gcd(pp("3*T2+6"), Poly(4)) == pp("T2+2"));
  CHECK_THROWS_AS(gcd(Poly(4), Poly(4)), StructuralError);
  const Poly a = pp("(T1+T2)^2*(T3-T1)*(T2*T3+1)");
  const Poly b = pp("(T1+T2)*(T3-T1)^2*(T2-7)");
  CHECK(gcd(a, b) == pp("(T1+T2)*(T1-T3)").monic());
}

TEST_CASE("ratfunc arithmetic") {
  CHECK((rf("T2/T3") * rf("T3/T2")).to_string() == "1");
  CHECK((rf("T2^2") / rf("T2")) == rf("T2"));
  CHECK((rf("1/(T2-1)") + rf("1/(T2+1)")).to_string() == "2*T2/(T2^2-1)");
  CHECK_THROWS_AS(rf("T2") / RatFunc(4), ArithmeticError);
}

TEST_CASE("partial derivative") {
  CHECK(partial_derivative(rf("T2^2"), 1) == rf("2*T2"));
  CHECK(partial_derivative(rf("T2"), 2).is_zero());
  CHECK(partial_derivative(rf("T2/T3"), 1) == rf("1/T3"));
  CHECK_THROWS_AS(partial_derivative(rf("T2"), 4), StructuralError);
}

TEST_CASE("evaluate") {
  const std::vector<Rat> p{0, 2, 3, 0};
  CHECK(evaluate(rf("T2+T3"), p) == 5);
  const std::vector<Rat> z{1, 0, 5, 0};
  CHECK_THROWS_AS(evaluate(rf("1/T2"), z), PoleError);
  const std::vector<Rat> q{0, 3, 4, 0};
  CHECK(evaluate(rf("(T2^2-T3)/(T2-1)"), q) == Rat(5, 2));
}

TEST_CASE("canonical string") {
  CHECK(canonical_string(rf("1")) == "1");
  CHECK(canonical_string(rf("T2-1")) == canonical_string(rf("-(1-T2)")));
  CHECK(canonical_string(rf("T2/2")) == "T2/2");
  CHECK(canonical_string(rf("(2*T2+2)/(4*T3)")) == "(T2+1)/(2*T3)");
  CHECK(canonical_string(rf("-T2/T3")) == "-T2/T3");
  // round trip through the parser
  for (const char* s : {"(T2^2-T3)/(T2-1)", "-3*T2*T3^2/(T4+1)", "T2^2/7", "0"})
    CHECK(canonical_string(rf(canonical_string(rf(s)).c_str())) == canonical_string(rf(s)));
}

TEST_CASE("field axioms on random rational functions") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 60; ++it) {
    const RatFunc a = random_rf(rng), b = random_rf(rng), c = random_rf(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
    if (!a.is_zero()) CHECK(a * a.inverse() == RatFunc::constant(3, 1));
    if (!b.is_zero()) CHECK(canonical_string(a * b / b) == canonical_string(a));
    CHECK(partial_derivative(a * b, 0) ==
          a * partial_derivative(b, 0) + b * partial_derivative(a, 0));
  }
}

TEST_CASE("gcd divides both arguments") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 60; ++it) {
    const RatFunc x = random_rf(rng), y = random_rf(rng), z = random_rf(rng);
    const Poly a = x.num() * z.num(), b = y.num() * z.num();
    if (a.is_zero() && b.is_zero()) continue;
    const Poly g = gcd(a, b);
    CHECK(a.divide_exact(g).has_value());
    CHECK(b.divide_exact(g).has_value());
    if (!z.num().is_zero() && !a.is_zero() && !b.is_zero()) CHECK(g.divide_exact(z.num().monic()).has_value());
  }
}

TEST_CASE("evaluation is a homomorphism") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> pt(-5, 5);
  int checked = 0;
  for (int it = 0; it < 100; ++it) {
    const RatFunc f = random_rf(rng), g = random_rf(rng);
    const std::vector<Rat> p{pt(rng), pt(rng), pt(rng)};
    Rat fg, fv, gv;
    try {
      fv = evaluate(f, p);
      gv = evaluate(g, p);
      fg = evaluate(f * g, p);
    } catch (const PoleError&) {
      continue;
    }
    CHECK(fg == fv * gv);
    ++checked;
  }
  CHECK(checked > 30);
}
