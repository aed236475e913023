#include <doctest.h>

#include "dval/textform.hpp"

using namespace dval;

TEST_CASE("parse and print") {
  CHECK(text::print(text::parse("T2 + 3*T3^2")) == "T2+3*T3^2");
  CHECK(text::print(text::parse("(T1-T2)*(T3)")) == "(T1-T2)*T3");
  CHECK(text::print(text::parse("T4^(1/2)*X1")) == "T4^(1/2)*X1");
  CHECK(text::print(text::parse("Y3")) == "X3");
}

TEST_CASE("parse errors carry positions") {
  try {
    text::parse("T2 + * T3", 7, 10);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(e.column() == 16);
  }
  CHECK_THROWS_AS(text::parse("T"), ParseError);
  CHECK_THROWS_AS(text::parse("(T1"), ParseError);
  CHECK_THROWS_AS(text::parse("T1 T2"), ParseError);
}

TEST_CASE("ramify clears fractional exponents") {
  const auto e = text::parse("T4^(1/2) + T4^(1/4)*T2 + T4");
  CHECK_THROWS_AS(text::evaluate<ParamVars>(e, 4), ParseError);
  const auto r = text::ramify(e, 3, 4);
  CHECK(text::evaluate<ParamVars>(r, 4) == text::parse_ratfunc("T4^2+T4*T2+T4^4", 4));
  CHECK(text::print(text::ramify(e, 3, 1)) == text::print(e));
  CHECK(!text::mentions(e, 'T', 2));
  CHECK(text::mentions(e, 'T', 3));
}

TEST_CASE("evaluation checks variable family and arity") {
  CHECK_THROWS_AS(text::parse_ratfunc("X1", 2), ParseError);
  CHECK_THROWS_AS(text::parse_ratfunc("T3", 2), ParseError);
  CHECK_THROWS_AS(text::parse_kelem("1/(X1-X1)", 2), ParseError);
  CHECK(text::parse_kelem("X2/X1*X1/X2", 2).to_string() == "1");
  CHECK(text::parse_kelem("(X1+X2)^2-(X1^2+2*X1*X2+X2^2)", 2).is_zero());
  CHECK(text::parse_kelem("X1^-2", 1).to_string() == "1/X1^2");
}

TEST_CASE("kelem built from parts matches the u3 numerator") {
  const KElem x1 = KElem::variable(5, 0), x2 = KElem::variable(5, 1), x3 = KElem::variable(5, 2);
  const KElem f = x1 * x3 - x2 * x2 - x1 * x1 * x2;
  CHECK(f == text::parse_kelem("X1*X3-X2^2-X1^2*X2", 5));
  CHECK((f / x1.pow(4)).to_string() == "(-X1^2*X2+X1*X3-X2^2)/X1^4");
}
