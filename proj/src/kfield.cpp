#include "dval/kfield.hpp"

#include <algorithm>

namespace dval {

// grlex decreasing
std::vector<Monomial> monomials_of_degree(std::size_t n, unsigned r) {
  std::vector<Monomial> out;
  Monomial m;
  m.degree = r;
  auto rec = [&](auto&& self, std::size_t k, unsigned left) -> void {
    if (k + 1 == n) {
      m.exps[k] = static_cast<std::uint16_t>(left);
      out.push_back(m);
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      m.exps[k] = static_cast<std::uint16_t>(e);
      self(self, k + 1, left - e);
    }
    m.exps[k] = 0;
  };
  if (n == 0) return out;
  rec(rec, 0, r);
  return out;
}

namespace {

int nonzero_coeff(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 5);
  std::bernoulli_distribution sign(0.5);
  return sign(rng) ? d(rng) : -d(rng);
}

}  // namespace

// splitmix64 over seed and index
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

XPoly random_form(std::size_t n, unsigned r, std::size_t budget, std::uint64_t seed) {
  if (n == 0) throw StructuralError("random_form needs at least one variable");
  std::mt19937_64 rng(seed);
  auto monos = monomials_of_degree(n, r);
  std::shuffle(monos.begin(), monos.end(), rng);
  const std::size_t k = std::clamp<std::size_t>(budget, 1, monos.size());
  std::uniform_int_distribution<std::size_t> count(1, k);
  const std::size_t take = count(rng);
  std::vector<XPoly::Term> terms;
  for (std::size_t i = 0; i < take; ++i) terms.push_back({monos[i], Rat(nonzero_coeff(rng))});
  return XPoly::from_terms(n, std::move(terms));
}

KElem random_kelem(std::size_t n, unsigned max_degree, std::size_t terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> count(1, std::max<std::size_t>(terms, 1));
  auto poly = [&] {
    XPoly p(n);
    while (p.is_zero()) {
      const std::size_t k = count(rng);
      for (std::size_t i = 0; i < k; ++i) {
        const unsigned r = deg(rng);
        p += random_form(n, r, 1, rng());
      }
    }
    return p;
  };
  const XPoly num = poly();
  std::bernoulli_distribution fraction(0.5);
  if (!fraction(rng)) return KElem(num);
  return KElem(num, poly());
}

void TruncatedXSeries::add(const Monomial& m, const RatFunc& c) {
  if (c.is_zero()) return;
  auto it = std::find_if(terms.begin(), terms.end(), [&](const Term& t) { return t.mono == m; });
  if (it != terms.end()) {
    it->coeff += c;
    if (it->coeff.is_zero()) terms.erase(it);
    return;
  }
  terms.push_back({m, c});
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return grlex_greater(a.mono, b.mono); });
}

std::string TruncatedXSeries::to_string() const {
  // Lowest degrees first: Y5 - a1*Y4 - a2*Y4^2 - ...
  std::vector<const Term*> order;
  for (const auto& t : terms) order.push_back(&t);
  std::reverse(order.begin(), order.end());
  std::string s;
  for (const Term* t : order) {
    std::string c = t->coeff.to_string();
    bool neg = false;
    if (c[0] == '-' && c.find_first_of("+-", 1) == std::string::npos) {
      neg = true;
      c.erase(0, 1);
    }
    std::string mono;
    for (std::size_t k = 0; k < nvars; ++k) {
      if (t->mono.exps[k] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += 'Y' + std::to_string(k + 1);
      if (t->mono.exps[k] > 1) mono += '^' + std::to_string(t->mono.exps[k]);
    }
    if (c.find_first_of("+-", 1) != std::string::npos || (c.find('/') != std::string::npos && !mono.empty() &&
                                                            c.find_first_of("*", 0) != std::string::npos))
      c = '(' + c + ')';
    std::string term;
    if (mono.empty()) term = c;
    else if (c == "1") term = mono;
    else term = c + '*' + mono;
    if (s.empty()) s = neg ? '-' + term : term;
    else s += (neg ? " - " : " + ") + term;
  }
  if (s.empty()) s = "0";
  if (truncated) s += " + O(deg " + std::to_string(total_degree_prec) + ")";
  return s;
}

}  // namespace dval
