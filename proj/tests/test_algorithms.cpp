#include <doctest.h>

#include <numeric>
#include <random>

#include "dval/algorithms.hpp"
#include "dval/specfile.hpp"
#include "oracle.hpp"

using namespace dval;

namespace {

std::string fixture(const char* name) { return std::string(DVAL_FIXTURES) + "/" + name; }
ValuationSpec load(const char* name) { return to_spec(load_spec_file(fixture(name))); }
ValuationSpec inline_spec(const std::string& text) { return to_spec(parse_spec(text)); }
KElem ke(const char* s, std::size_t n) { return text::parse_kelem(s, n); }
RatFunc rf(const char* s, std::size_t np) { return text::parse_ratfunc(s, np); }

ValuationSpec monomial_spec(const std::vector<long>& alpha) {
  std::string s = "arity " + std::to_string(alpha.size()) + "\nparams 0\n";
  for (std::size_t i = 0; i < alpha.size(); ++i)
    s += "X" + std::to_string(i + 1) + " = t^" + std::to_string(alpha[i]) + "\n";
  return inline_spec(s);
}

std::vector<long> entry_values(const ValuationSpec& v) {
  std::vector<long> out;
  for (const auto& e : v.psi) out.push_back(ord(e).amount);
  return out;
}

}  // namespace

TEST_CASE("gcd_normalize examples") {
  GcdResult a = gcd_normalize(monomial_spec({2, 3}));
  CHECK(a.common == 1);
  CHECK(entry_values(a.spec) == std::vector<long>{1, 1});
  GcdResult b = gcd_normalize(monomial_spec({4, 6}));
  CHECK(entry_values(b.spec) == std::vector<long>{2, 2});
  GcdResult c = gcd_normalize(monomial_spec({1, 1, 1}));
  CHECK(c.log.empty());
  CHECK(describe(c.spec) == describe(monomial_spec({1, 1, 1})));
}

TEST_CASE("property: gcd_normalize agrees with integer euclid") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> val(1, 30);
  std::uniform_int_distribution<std::size_t> len(1, 5);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<long> alpha(len(rng));
    for (auto& x : alpha) x = val(rng);
    const ValuationSpec v = monomial_spec(alpha);
    const GcdResult g = gcd_normalize(v);
    long want = 0;
    for (long x : alpha) want = std::gcd(want, x);
    CHECK(g.common == want);
    for (long x : entry_values(g.spec)) CHECK(x == want);
    for (const auto& s : g.log.steps()) CHECK(s.kind != TransformStep::Kind::CoordChange);
    CHECK(describe(replay(v, g.log)) == describe(g.spec));
  }
}

TEST_CASE("find_uniformizer on the n = 2 example") {
  const ValuationSpec v = load("ex41.val");
  const UniformizerResult u = find_uniformizer(v);
  REQUIRE(u.status == UniformizerResult::Status::Found);
  CHECK(ord(u.spec_after.psi[u.index]) == Value::exact(1));
  // X2 = Y1 + Y1^3 + Y1^3*Y2
  CHECK(u.log.pullback(ke("X2", 2)) == ke("(X2 - X1 - X1^3)/X1^3", 2));
  CHECK(u.log.pullback(ke("X1", 2)) == ke("X1", 2));
  std::string geo;
  for (int i = 1; i < 16; ++i) geo += (i > 1 ? " + " : "") + std::string("T1^") + std::to_string(i) + "*t^" + std::to_string(i);
  const TSeries want = to_spec(parse_spec("arity 1\nparams 1\nX1 = " + geo + "\n")).psi[0];
  CHECK(u.spec_after.psi[1].truncated(16).to_string() == want.truncated(16).to_string());
  for (std::size_t k = 1; k < u.min_history.size(); ++k) CHECK(u.min_history[k] <= u.min_history[k - 1]);
}

TEST_CASE("find_uniformizer trivial and plateau") {
  const UniformizerResult a = find_uniformizer(inline_spec("arity 1\nX1 = t\n"));
  CHECK(a.status == UniformizerResult::Status::Found);
  CHECK(a.log.empty());
  const UniformizerResult b = find_uniformizer(monomial_spec({2, 6}));
  CHECK(b.status == UniformizerResult::Status::GcdPlateau);
  CHECK(b.plateau == 2);
  CHECK(b.status_string() == "GcdPlateau(2)");
}

TEST_CASE("property: uniformizer minimum never increases") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> val(1, 6), c(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::string s = "arity 3\nparams 1\n";
    for (int i = 1; i <= 3; ++i)
      s += "X" + std::to_string(i) + " = " + std::to_string(c(rng)) + "*t^" + std::to_string(val(rng)) + " + T1*t^" +
           std::to_string(7 + i) + "\n";
    const UniformizerResult u = find_uniformizer(inline_spec(s));
    for (std::size_t k = 1; k < u.min_history.size(); ++k) CHECK(u.min_history[k] <= u.min_history[k - 1]);
    if (u.status == UniformizerResult::Status::Found) CHECK(ord(u.spec_after.psi[u.index]) == Value::exact(1));
  }
}

TEST_CASE("is_algebraic_over examples") {
  const RatFunc t2 = rf("T2", 3), t3 = rf("T3", 3);
  std::vector<RatFunc> g{t2};
  CHECK(is_algebraic_over(g, rf("T2^2", 3)));
  CHECK_FALSE(is_algebraic_over(g, t3));
  CHECK(is_algebraic_over(std::vector<RatFunc>{}, rf("7", 3)));
  std::vector<RatFunc> sym{rf("T2+T3", 3), rf("T2*T3", 3)};
  CHECK(is_algebraic_over(sym, t2));
  CHECK(jacobian_rank(sym) == 2);
  std::vector<RatFunc> frac{rf("T1/(T2+1)", 3)};
  CHECK(is_algebraic_over(frac, rf("(T2+1)^2/T1^2", 3)));
  CHECK_FALSE(is_algebraic_over(frac, rf("T1", 3)));
}

TEST_CASE("property: is_algebraic_over agrees with the elimination oracle") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<unsigned> deg(1, 4);
  int disagreements = 0, algebraic = 0, total = 0;
  for (std::size_t s = 1; s <= 3; ++s) {
    for (int trial = 0; trial < 25; ++trial) {
      auto random_poly = [&](unsigned d) {
        Poly p(s);
        while (p.is_constant()) {
          p = Poly(s);
          for (unsigned r = 1; r <= d; ++r)
            for (const auto& m : monomials_of_degree(s, r))
              if (rng() % 3 == 0) p += Poly::monomial(s, m, coef(rng));
        }
        return p;
      };
      const std::size_t k = rng() % std::min<std::size_t>(s + 1, 3);
      std::vector<Poly> gens;
      long weight = 1;
      for (std::size_t i = 0; i < k; ++i) {
        const unsigned d = std::min<unsigned>(deg(rng), weight > 4 ? 1 : 4);
        gens.push_back(random_poly(d));
        weight *= d;
      }
      // sometimes build r from the generators so that the algebraic side is exercised
      Poly r = random_poly(std::min<unsigned>(deg(rng), weight > 4 ? 1 : 2));
      if (!gens.empty() && rng() % 2 == 0) r = gens[0] * gens[0] + (gens.size() > 1 ? gens[1] : gens[0]);
      std::vector<RatFunc> g;
      for (const auto& p : gens) g.push_back(RatFunc(p));
      const bool mine = is_algebraic_over(g, RatFunc(r));
      const bool theirs = oracle::algebraic_over(gens, r);
      disagreements += mine != theirs;
      algebraic += theirs;
      ++total;
    }
  }
  CHECK(disagreements == 0);
  CHECK(algebraic > 0);
  CHECK(algebraic < total);
}

TEST_CASE("first_transcendental_residue") {
  const UniformizerResult u = find_uniformizer(load("ex41.val"));
  const FirstTranscendental a = first_transcendental_residue(u.spec_after);
  CHECK(a.residue == rf("T1", 1));
  const FirstTranscendental b = first_transcendental_residue(load("order_n3.val"));
  CHECK(b.residue == rf("T2", 3));
  CHECK(b.log.empty());
  const FirstTranscendental c = first_transcendental_residue(inline_spec("arity 2\nparams 2\nX1 = t\nX2 = t + T2*t^2\n"));
  CHECK(c.residue == rf("T2", 2));
  REQUIRE(c.prelim.size() == 1);
  CHECK(c.prelim[0].first == rf("1", 2));
  CHECK(c.base_algebraics.size() == 1);
  CHECK_THROWS_AS(first_transcendental_residue(inline_spec("arity 2\nX1 = t\nX2 = t + t^2\n")), InconclusiveError);
}

TEST_CASE("residue field of the worked example") {
  const ValuationSpec v = load("ex61.val");
  ResidueFieldOptions o;
  o.tower_depth = 2;
  const ResidueFieldReport r = build_residue_field(v, o);
  CHECK_FALSE(r.inconclusive);
  CHECK(r.dimension == 3);
  CHECK(r.m == 4);
  REQUIRE(r.generators.size() == 4);
  CHECK(r.generators[0].representative->to_string() == ke("X2/X1", 5).to_string());
  CHECK(r.generators[1].representative->to_string() == ke("(X1*X3-X2^2-X1^2*X2)/X1^4", 5).to_string());
  CHECK(r.generators[2].representative->to_string() ==
        ke("(X1^2*X4-X2^3-X1^2*X2^2-X1^2*X3+X1*X2^2+X1^3*X2)/X1^6", 5).to_string());
  CHECK(r.generators[2].u == rf("T4^4", 4));
  const GeneratorEntry& tower = r.generators[3];
  CHECK(tower.kind == GeneratorEntry::Kind::AlgebraicTower);
  REQUIRE(tower.members.size() == 2);
  CHECK(tower.members[0] == rf("T4^2", 4));
  CHECK(tower.members[1] == rf("T4", 4));
  CHECK(tower.truncated);

  const auto w = implicit_ideal(r);
  REQUIRE(w.size() == 1);
  CHECK(w[0].truncated);
  CHECK(w[0].to_string() == "Y5 - T4^2*Y1 - T4*Y1^2 + O(deg 32)");
}

TEST_CASE("property: report self-consistency") {
  for (const char* f : {"ex41.val", "ex61.val", "ex73.val", "order_n3.val", "order_n4.val"}) {
    const ValuationSpec v = load(f);
    const ResidueFieldReport r = build_residue_field(v);
    CHECK(r.dimension <= v.n - 1);
    std::vector<RatFunc> gens;
    for (const auto& g : r.generators) {
      if (g.kind == GeneratorEntry::Kind::Transcendental) {
        CHECK_FALSE(g.u.is_zero());
        CHECK_FALSE(is_algebraic_over(gens, g.u));
        gens.push_back(g.u);
        if (g.representative) CHECK(residue(v, *g.representative) == g.u);
      }
    }
    for (const auto& g : r.generators)
      for (const auto& m : g.members) CHECK(is_algebraic_over(gens, m));
    const bool full = r.dimension == v.n - 1;
    if (full) CHECK(check_order_function(r.spec_after, 3, 5).pass);
    CHECK(implicit_ideal(r).empty() == full);
  }
}

TEST_CASE("order-function specs and n = 2") {
  CHECK(build_residue_field(load("order_n3.val")).dimension == 2);
  CHECK(build_residue_field(load("order_n4.val")).dimension == 3);
  CHECK(build_residue_field(load("ex41.val")).dimension == 1);
  CHECK(build_residue_field(inline_spec("arity 2\nparams 1\nX1 = t^2\nX2 = t^3 + T1*t^4\n")).dimension == 1);
}

TEST_CASE("implicit ideal of the rank-one example") {
  const ResidueFieldReport r = build_residue_field(load("ex73.val"));
  CHECK(r.dimension == 3);
  const auto w = implicit_ideal(r);
  REQUIRE(w.size() == 1);
  CHECK(w[0].to_string().rfind("Y5 - Y4 - 1/2*Y4^2 - 1/6*Y4^3 - 1/24*Y4^4", 0) == 0);
  CHECK(implicit_ideal(build_residue_field(load("order_n3.val"))).empty());
}

TEST_CASE("check_order_function") {
  CHECK(check_order_function(load("order_n3.val"), 5, 20).pass);
  const OrderCheck bad = check_order_function(inline_spec("arity 2\nX1 = t\nX2 = t + t^2\n"), 3, 20);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.witness);
  CHECK(bad.witness->to_string() == ke("X1 - X2", 2).num().to_string());
  CHECK(bad.witness_value == Value::exact(2));
  const UniformizerResult u = find_uniformizer(load("ex41.val"));
  CHECK(check_order_function(u.spec_after, 4, 10).pass);
  CHECK_THROWS_AS(check_order_function(monomial_spec({1, 2})), ContractError);
}

TEST_CASE("extend_to_order_function") {
  const ExtensionReport a = extend_to_order_function(build_residue_field(load("order_n4.val")));
  CHECK(a.case_number == 1);
  CHECK(a.order.pass);

  const ExtensionReport b = extend_to_order_function(build_residue_field(load("ex61.val")));
  CHECK(b.case_number == 2);
  CHECK(b.rank == 2);
  CHECK(b.samples == 50);
  CHECK(b.mismatches == 0);
  CHECK(b.skipped == 0);
  REQUIRE(b.table.size() == 5);
  CHECK(b.table.back().first == "W5");
  CHECK(b.table.back().second == std::vector<long>{1, 0});
  CHECK(b.table.front().second == std::vector<long>{0, 1});

  const ExtensionReport c = extend_to_order_function(build_residue_field(load("ex73.val")));
  CHECK(c.case_number == 2);
  CHECK(c.order.pass);
  CHECK(c.mismatches == 0);
}
