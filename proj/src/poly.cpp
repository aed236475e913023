#include "dval/poly.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace dval {

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(std::size_t i, unsigned power) {
  if (i >= kMaxVars) throw StructuralError("variable index out of range");
  if (power > 0xFFFFu) throw StructuralError("exponent overflow");
  Monomial m;
  m.exps[i] = static_cast<std::uint16_t>(power);
  m.degree = power;
  return m;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r;
  for (std::size_t k = 0; k < kMaxVars; ++k) {
    const unsigned e = unsigned{exps[k]} + unsigned{other.exps[k]};
    if (e > 0xFFFFu) throw StructuralError("exponent overflow");
    r.exps[k] = static_cast<std::uint16_t>(e);
  }
  r.degree = degree + other.degree;
  return r;
}

bool Monomial::divides(const Monomial& other) const {
  if (degree > other.degree) return false;
  for (std::size_t k = 0; k < kMaxVars; ++k)
    if (exps[k] > other.exps[k]) return false;
  return true;
}

Monomial Monomial::cofactor(const Monomial& other) const {
  Monomial r;
  for (std::size_t k = 0; k < kMaxVars; ++k)
    r.exps[k] = static_cast<std::uint16_t>(other.exps[k] - exps[k]);
  r.degree = other.degree - degree;
  return r;
}

bool grlex_greater(const Monomial& a, const Monomial& b) {
  if (a.degree != b.degree) return a.degree > b.degree;
  for (std::size_t k = 0; k < kMaxVars; ++k)
    if (a.exps[k] != b.exps[k]) return a.exps[k] > b.exps[k];
  return false;
}

std::string rat_to_string(const Rat& r) {
  return r.get_str();
}

// ------------------------------------------------------------------- MPoly

template <class V>
MPoly<V>::MPoly(std::size_t nvars) : nvars_(nvars) {
  if (nvars > kMaxVars) throw StructuralError("too many variables");
}

template <class V>
MPoly<V> MPoly<V>::constant(std::size_t nvars, const Rat& c) {
  MPoly p(nvars);
  if (c != 0) p.terms_.push_back({Monomial::unit(), c});
  return p;
}

template <class V>
MPoly<V> MPoly<V>::variable(std::size_t nvars, std::size_t i) {
  if (i >= nvars) throw StructuralError("variable index out of range");
  MPoly p(nvars);
  p.terms_.push_back({Monomial::variable(i), Rat(1)});
  return p;
}

template <class V>
MPoly<V> MPoly<V>::monomial(std::size_t nvars, const Monomial& m, const Rat& c) {
  MPoly p(nvars);
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

template <class V>
MPoly<V> MPoly<V>::from_terms(std::size_t nvars, std::vector<Term> terms) {
  MPoly p(nvars);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return grlex_greater(a.mono, b.mono); });
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coeff += t.coeff;
      if (p.terms_.back().coeff == 0) p.terms_.pop_back();
    } else if (t.coeff != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

template <class V>
bool MPoly<V>::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.degree == 0);
}

template <class V>
Rat MPoly<V>::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.degree == 0) return terms_.back().coeff;
  return Rat(0);
}

template <class V>
const typename MPoly<V>::Term& MPoly<V>::leading() const {
  if (terms_.empty()) throw ArithmeticError("leading term of zero polynomial");
  return terms_.front();
}

template <class V>
int MPoly<V>::total_degree() const {
  return terms_.empty() ? -1 : static_cast<int>(terms_.front().mono.degree);
}

template <class V>
int MPoly<V>::degree_in(std::size_t i) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) d = std::max(d, int{t.mono.exps[i]});
  return d;
}

template <class V>
int MPoly<V>::min_total_degree() const {
  return terms_.empty() ? -1 : static_cast<int>(terms_.back().mono.degree);
}

template <class V>
void MPoly<V>::check_same_arity(const MPoly& o) const {
  if (nvars_ != o.nvars_) throw StructuralError("polynomial arity mismatch");
}

template <class V>
bool MPoly<V>::same_terms(const MPoly& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t k = 0; k < terms_.size(); ++k)
    if (!(terms_[k].mono == o.terms_[k].mono) || terms_[k].coeff != o.terms_[k].coeff)
      return false;
  return true;
}

template <class V>
MPoly<V> MPoly<V>::operator-() const {
  MPoly r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

template <class Term, bool Subtract>
std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && grlex_greater(a[i].mono, b[j].mono))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || grlex_greater(b[j].mono, a[i].mono)) {
      out.push_back(b[j]);
      if constexpr (Subtract) out.back().coeff = -out.back().coeff;
      ++j;
    } else {
      Rat c = Subtract ? Rat(a[i].coeff - b[j].coeff) : Rat(a[i].coeff + b[j].coeff);
      if (c != 0) out.push_back({a[i].mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

template <class V>
MPoly<V>& MPoly<V>::operator+=(const MPoly& o) {
  check_same_arity(o);
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  terms_ = merge_terms<Term, false>(terms_, o.terms_);
  return *this;
}

template <class V>
MPoly<V>& MPoly<V>::operator-=(const MPoly& o) {
  check_same_arity(o);
  if (o.terms_.empty()) return *this;
  terms_ = merge_terms<Term, true>(terms_, o.terms_);
  return *this;
}

template <class V>
MPoly<V>& MPoly<V>::operator*=(const MPoly& o) {
  return *this = mul(o);
}

template <class V>
MPoly<V> MPoly<V>::mul(const MPoly& o) const {
  check_same_arity(o);
  if (terms_.empty() || o.terms_.empty()) return MPoly(nvars_);
  if (o.terms_.size() == 1) return times_monomial(o.terms_[0].mono, o.terms_[0].coeff);
  if (terms_.size() == 1) return o.times_monomial(terms_[0].mono, terms_[0].coeff);
  std::vector<Term> prods;
  prods.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) prods.push_back({a.mono * b.mono, a.coeff * b.coeff});
  return from_terms(nvars_, std::move(prods));
}

template <class V>
MPoly<V> MPoly<V>::scaled(const Rat& c) const {
  if (c == 0) return MPoly(nvars_);
  MPoly r = *this;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

template <class V>
MPoly<V> MPoly<V>::times_monomial(const Monomial& m, const Rat& c) const {
  if (c == 0) return MPoly(nvars_);
  MPoly r(nvars_);
  r.terms_.reserve(terms_.size());
  for (const auto& t : terms_) r.terms_.push_back({t.mono * m, t.coeff * c});
  return r;
}

template <class V>
MPoly<V> MPoly<V>::pow(unsigned e) const {
  MPoly result = constant(nvars_, 1);
  MPoly base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return result;
}

template <class V>
MPoly<V> MPoly<V>::derivative(std::size_t i) const {
  if (i >= nvars_) throw StructuralError("derivative index out of range");
  std::vector<Term> out;
  for (const auto& t : terms_) {
    const unsigned e = t.mono.exps[i];
    if (e == 0) continue;
    Monomial m = t.mono;
    m.exps[i] = static_cast<std::uint16_t>(e - 1);
    m.degree -= 1;
    out.push_back({m, t.coeff * e});
  }
  return from_terms(nvars_, std::move(out));
}

template <class V>
Rat MPoly<V>::evaluate(std::span<const Rat> point) const {
  if (point.size() != nvars_) throw StructuralError("evaluation point has wrong length");
  Rat sum = 0;
  for (const auto& t : terms_) {
    Rat v = t.coeff;
    for (std::size_t k = 0; k < nvars_; ++k) {
      for (unsigned e = 0; e < t.mono.exps[k]; ++e) v *= point[k];
    }
    sum += v;
  }
  return sum;
}

template <class V>
std::optional<MPoly<V>> MPoly<V>::divide_exact(const MPoly& d) const {
  check_same_arity(d);
  if (d.is_zero()) throw ArithmeticError("division by zero polynomial");
  if (is_zero()) return MPoly(nvars_);
  const Term& lead = d.leading();
  if (d.terms_.size() == 1) {
    MPoly q(nvars_);
    q.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!lead.mono.divides(t.mono)) return std::nullopt;
      q.terms_.push_back({lead.mono.cofactor(t.mono), t.coeff / lead.coeff});
    }
    return q;
  }
  MPoly r = *this;
  std::vector<Term> quotient;
  while (!r.is_zero()) {
    const Term& lt = r.leading();
    if (!lead.mono.divides(lt.mono)) return std::nullopt;
    Term qt{lead.mono.cofactor(lt.mono), lt.coeff / lead.coeff};
    r -= d.times_monomial(qt.mono, qt.coeff);
    quotient.push_back(std::move(qt));
  }
  // Quotient terms were produced in decreasing order.
  MPoly q(nvars_);
  q.terms_ = std::move(quotient);
  return q;
}

template <class V>
MPoly<V> MPoly<V>::monic() const {
  if (is_zero()) return *this;
  const Rat lc = leading().coeff;
  if (lc == 1) return *this;
  return scaled(1 / lc);
}

template <class V>
MPoly<V> MPoly<V>::raise_variable(std::size_t i, unsigned e) const {
  if (i >= nvars_) throw StructuralError("variable index out of range");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m = t.mono;
    const unsigned ne = unsigned{m.exps[i]} * e;
    if (ne > 0xFFFFu) throw StructuralError("exponent overflow");
    m.degree = m.degree - m.exps[i] + ne;
    m.exps[i] = static_cast<std::uint16_t>(ne);
    out.push_back({m, t.coeff});
  }
  return from_terms(nvars_, std::move(out));
}

template <class V>
template <class Other>
MPoly<Other> MPoly<V>::embed(std::size_t nvars, std::span<const std::size_t> map) const {
  if (map.size() != nvars_) throw StructuralError("embedding map has wrong length");
  std::vector<typename MPoly<Other>::Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m;
    for (std::size_t k = 0; k < nvars_; ++k) {
      if (map[k] >= nvars) throw StructuralError("embedding target out of range");
      m.exps[map[k]] = static_cast<std::uint16_t>(m.exps[map[k]] + t.mono.exps[k]);
    }
    m.degree = t.mono.degree;
    out.push_back({m, t.coeff});
  }
  return MPoly<Other>::from_terms(nvars, std::move(out));
}

template <class V>
std::string MPoly<V>::to_string() const {
  return Frac<V>(*this).to_string();
}

// --------------------------------------------------------------------- gcd

namespace {

template <class V>
using CoeffMap = std::map<int, MPoly<V>, std::greater<>>;

// Coefficients of p viewed as a univariate polynomial in variable v.
template <class V>
CoeffMap<V> coeffs_wrt(const MPoly<V>& p, std::size_t v) {
  std::map<int, std::vector<typename MPoly<V>::Term>, std::greater<>> buckets;
  for (const auto& t : p.terms()) {
    Monomial m = t.mono;
    const int e = m.exps[v];
    m.exps[v] = 0;
    m.degree -= static_cast<std::uint32_t>(e);
    buckets[e].push_back({m, t.coeff});
  }
  CoeffMap<V> out;
  for (auto& [e, ts] : buckets) out.emplace(e, MPoly<V>::from_terms(p.nvars(), std::move(ts)));
  return out;
}

template <class V>
MPoly<V> one(std::size_t n) {
  return MPoly<V>::constant(n, 1);
}

template <class V>
MPoly<V> gcd_rec(const MPoly<V>& a, const MPoly<V>& b);

// gcd of the coefficients of p with respect to variable v.
template <class V>
MPoly<V> content_wrt(const MPoly<V>& p, std::size_t v) {
  const auto cs = coeffs_wrt(p, v);
  MPoly<V> g(p.nvars());
  for (const auto& [e, c] : cs) {
    g = gcd_rec(g, c);
    if (g.is_constant()) return one<V>(p.nvars());
  }
  return g;
}

template <class V>
MPoly<V> monomial_gcd(const typename MPoly<V>::Term& m, const MPoly<V>& p) {
  Monomial g = m.mono;
  for (const auto& t : p.terms()) {
    g.degree = 0;
    for (std::size_t k = 0; k < kMaxVars; ++k) {
      g.exps[k] = std::min(g.exps[k], t.mono.exps[k]);
      g.degree += g.exps[k];
    }
  }
  return MPoly<V>::monomial(p.nvars(), g, Rat(1));
}

// Full pseudo-remainder: lc(b)^(da-db+1) * a mod b in variable v.
template <class V>
MPoly<V> pseudo_remainder(MPoly<V> a, const MPoly<V>& b, std::size_t v) {
  const auto bc = coeffs_wrt(b, v);
  const int db = bc.begin()->first;
  const MPoly<V>& lcb = bc.begin()->second;
  int budget = a.degree_in(v) - db + 1;
  while (!a.is_zero()) {
    const auto ac = coeffs_wrt(a, v);
    const int da = ac.begin()->first;
    if (da < db) break;
    const MPoly<V>& lca = ac.begin()->second;
    a = a * lcb - (lca * b).times_monomial(Monomial::variable(v, static_cast<unsigned>(da - db)), 1);
    --budget;
  }
  if (budget > 0 && !a.is_zero()) a *= lcb.pow(static_cast<unsigned>(budget));
  return a;
}

template <class V>
MPoly<V> lead_wrt(const MPoly<V>& p, std::size_t v) {
  return coeffs_wrt(p, v).begin()->second;
}

template <class V>
MPoly<V> primitive_part(const MPoly<V>& p, std::size_t v) {
  const MPoly<V> c = content_wrt(p, v);
  if (c.is_constant()) return p.monic();
  return p.divide_exact(c)->monic();
}

// Dense univariate image of p in variable v, other variables fixed at `point`.
template <class V>
std::vector<Rat> univariate_image(const MPoly<V>& p, std::size_t v, const std::vector<Rat>& point) {
  std::vector<Rat> out(static_cast<std::size_t>(p.degree_in(v)) + 1);
  for (const auto& t : p.terms()) {
    Rat c = t.coeff;
    for (std::size_t k = 0; k < p.nvars(); ++k) {
      if (k == v || t.mono.exps[k] == 0) continue;
      Rat x;
      mpz_pow_ui(x.get_num_mpz_t(), point[k].get_num_mpz_t(), t.mono.exps[k]);
      c *= x;
    }
    out[t.mono.exps[v]] += c;
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

int univariate_gcd_degree(std::vector<Rat> a, std::vector<Rat> b) {
  while (!b.empty()) {
    while (a.size() >= b.size() && !a.empty()) {
      const Rat q = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= q * b[i];
      a.pop_back();
      while (!a.empty() && a.back() == 0) a.pop_back();
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

// Exact certificate that gcd(a, b) = 1: for each shared variable, a
// specialization keeping both leading coefficients nonzero whose univariate
// gcd is constant bounds the degree of the true gcd in that variable by 0.
template <class V>
bool certainly_coprime(const MPoly<V>& a, const MPoly<V>& b) {
  const std::size_t n = a.nvars();
  for (std::size_t v = 0; v < n; ++v) {
    if (a.degree_in(v) == 0 || b.degree_in(v) == 0) continue;
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      std::vector<Rat> point(n);
      for (std::size_t k = 0; k < n; ++k) point[k] = Rat(static_cast<long>(3 + 7 * k + 11 * attempt + (k * k * 5) % 13));
      const auto ia = univariate_image(a, v, point);
      const auto ib = univariate_image(b, v, point);
      if (static_cast<int>(ia.size()) - 1 != a.degree_in(v) ||
          static_cast<int>(ib.size()) - 1 != b.degree_in(v))
        continue;
      if (univariate_gcd_degree(ia, ib) > 0) return false;
      ok = true;
    }
    if (!ok) return false;
  }
  return true;
}

template <class V>
MPoly<V> gcd_rec(const MPoly<V>& a, const MPoly<V>& b) {
  const std::size_t n = a.nvars();
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return one<V>(n);
  if (a.is_monomial()) return monomial_gcd(a.leading(), b);
  if (b.is_monomial()) return monomial_gcd(b.leading(), a);
  if (a == b) return a.monic();
  if (certainly_coprime(a, b)) return one<V>(n);

  // A variable present in only one argument cannot occur in the gcd.
  std::size_t pick = n;
  int best = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const int da = a.degree_in(v), db = b.degree_in(v);
    if (da > 0 && db == 0) return gcd_rec(content_wrt(a, v), b);
    if (db > 0 && da == 0) return gcd_rec(a, content_wrt(b, v));
    if (da > 0 && (pick == n || std::max(da, db) < best)) {
      pick = v;
      best = std::max(da, db);
    }
  }
  const std::size_t v = pick;
  const MPoly<V> ca = content_wrt(a, v), cb = content_wrt(b, v);
  MPoly<V> pa = ca.is_constant() ? a.monic() : a.divide_exact(ca)->monic();
  MPoly<V> pb = cb.is_constant() ? b.monic() : b.divide_exact(cb)->monic();
  const MPoly<V> c = gcd_rec(ca, cb);

  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  if (pa.divide_exact(pb)) return (c * pb).monic();
  // subresultant remainder sequence
  MPoly<V> g;
  MPoly<V> sg = one<V>(n), sh = one<V>(n);
  for (;;) {
    const int d = pa.degree_in(v) - pb.degree_in(v);
    MPoly<V> r = pseudo_remainder(pa, pb, v);
    if (r.is_zero()) {
      g = primitive_part(pb, v);
      break;
    }
    if (r.degree_in(v) == 0) {
      g = one<V>(n);
      break;
    }
    const MPoly<V> div = sg * sh.pow(static_cast<unsigned>(d));
    pa = std::move(pb);
    pb = *r.divide_exact(div);
    sg = lead_wrt(pa, v);
    if (d == 0) {
    } else if (d == 1) {
      sh = sg;
    } else {
      sh = *sg.pow(static_cast<unsigned>(d)).divide_exact(sh.pow(static_cast<unsigned>(d - 1)));
    }
  }
  return (c * g).monic();
}

}  // namespace

template <class V>
MPoly<V> gcd(const MPoly<V>& a, const MPoly<V>& b) {
  if (a.nvars() != b.nvars()) throw StructuralError("polynomial arity mismatch");
  if (a.is_zero() && b.is_zero()) throw StructuralError("gcd of two zero polynomials");
  return gcd_rec(a, b);
}

// -------------------------------------------------------------------- Frac

template <class V>
Frac<V>::Frac(std::size_t nvars) : num_(nvars), den_(MPoly<V>::constant(nvars, 1)) {}

template <class V>
Frac<V>::Frac(MPoly<V> p) : num_(std::move(p)), den_(MPoly<V>::constant(num_.nvars(), 1)) {}

template <class V>
Frac<V>::Frac(MPoly<V> num, MPoly<V> den) : num_(std::move(num)), den_(std::move(den)) {
  if (num_.nvars() != den_.nvars()) throw StructuralError("fraction arity mismatch");
  normalize();
}

template <class V>
Frac<V> Frac<V>::constant(std::size_t nvars, const Rat& c) {
  return Frac(MPoly<V>::constant(nvars, c));
}

template <class V>
Frac<V> Frac<V>::variable(std::size_t nvars, std::size_t i) {
  return Frac(MPoly<V>::variable(nvars, i));
}

template <class V>
void Frac<V>::normalize() {
  if (den_.is_zero()) throw ArithmeticError("division by zero");
  if (num_.is_zero()) {
    den_ = MPoly<V>::constant(num_.nvars(), 1);
    return;
  }
  if (den_.is_constant()) {
    const Rat c = den_.leading().coeff;
    if (c != 1) {
      num_ = num_.scaled(1 / c);
      den_ = MPoly<V>::constant(num_.nvars(), 1);
    }
    return;
  }
  if (!num_.is_constant()) {
    const MPoly<V> g = gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = *num_.divide_exact(g);
      den_ = *den_.divide_exact(g);
    }
  }
  const Rat lc = den_.leading().coeff;
  if (lc != 1) {
    num_ = num_.scaled(1 / lc);
    den_ = den_.scaled(1 / lc);
  }
}

template <class V>
Rat Frac<V>::constant_value() const {
  if (!is_constant()) throw ContractError("rational function is not constant");
  return num_.constant_term();
}

template <class V>
Frac<V> Frac<V>::operator-() const {
  Frac r = *this;
  r.num_ = -r.num_;
  return r;
}

template <class V>
Frac<V>& Frac<V>::operator+=(const Frac& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    if (!den_.is_constant()) normalize();
    else if (num_.is_zero()) den_ = MPoly<V>::constant(num_.nvars(), 1);
    return *this;
  }
  const MPoly<V> g = gcd(den_, o.den_);
  const MPoly<V> d1 = *den_.divide_exact(g);
  const MPoly<V> d2 = *o.den_.divide_exact(g);
  num_ = num_ * d2 + o.num_ * d1;
  den_ = d1 * o.den_;
  normalize();
  return *this;
}

template <class V>
Frac<V>& Frac<V>::operator-=(const Frac& o) {
  return *this += -o;
}

template <class V>
Frac<V>& Frac<V>::operator*=(const Frac& o) {
  if (is_zero() || o.is_zero()) {
    if (nvars() != o.nvars()) throw StructuralError("fraction arity mismatch");
    return *this = Frac(nvars());
  }
  if (den_.is_constant() && o.den_.is_constant()) {
    num_ *= o.num_;
    return *this;
  }
  const MPoly<V> g1 = gcd(num_, o.den_);
  const MPoly<V> g2 = gcd(o.num_, den_);
  MPoly<V> n1 = g1.is_constant() ? num_ : *num_.divide_exact(g1);
  MPoly<V> d2 = g1.is_constant() ? o.den_ : *o.den_.divide_exact(g1);
  MPoly<V> n2 = g2.is_constant() ? o.num_ : *o.num_.divide_exact(g2);
  MPoly<V> d1 = g2.is_constant() ? den_ : *den_.divide_exact(g2);
  num_ = n1 * n2;
  den_ = d1 * d2;
  const Rat lc = den_.leading().coeff;
  if (lc != 1) {
    num_ = num_.scaled(1 / lc);
    den_ = den_.scaled(1 / lc);
  }
  return *this;
}

template <class V>
Frac<V>& Frac<V>::operator/=(const Frac& o) {
  return *this *= o.inverse();
}

template <class V>
Frac<V> Frac<V>::inverse() const {
  if (is_zero()) throw ArithmeticError("division by zero");
  Frac r;
  r.num_ = den_;
  r.den_ = num_;
  const Rat lc = r.den_.leading().coeff;
  if (lc != 1) {
    r.num_ = r.num_.scaled(1 / lc);
    r.den_ = r.den_.scaled(1 / lc);
  }
  return r;
}

template <class V>
Frac<V> Frac<V>::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  Frac r;
  r.num_ = num_.pow(static_cast<unsigned>(e));
  r.den_ = den_.pow(static_cast<unsigned>(e));
  return r;
}

template <class V>
Frac<V> Frac<V>::scaled(const Rat& c) const {
  Frac r = *this;
  r.num_ = r.num_.scaled(c);
  if (c == 0) r.den_ = MPoly<V>::constant(nvars(), 1);
  return r;
}

template <class V>
Frac<V> Frac<V>::derivative(std::size_t i) const {
  if (i >= nvars()) throw StructuralError("derivative index out of range");
  if (den_.is_constant()) return Frac(num_.derivative(i));
  return Frac(num_.derivative(i) * den_ - num_ * den_.derivative(i), den_ * den_);
}

template <class V>
Rat Frac<V>::evaluate(std::span<const Rat> point) const {
  const Rat d = den_.evaluate(point);
  if (d == 0) throw PoleError("denominator vanishes at evaluation point");
  return num_.evaluate(point) / d;
}

namespace {

template <class V, class Target>
struct PowerCache {
  std::vector<std::vector<MPoly<Target>>> nums, dens;

  const MPoly<Target>& get(std::vector<std::vector<MPoly<Target>>>& table, std::size_t var,
                           unsigned e, const MPoly<Target>& base) {
    auto& row = table[var];
    if (row.empty()) row.push_back(MPoly<Target>::constant(base.nvars(), 1));
    while (row.size() <= e) row.push_back(row.back() * base);
    return row[e];
  }
};

// p(images) as numerator over the common denominator prod q_i^{deg_i p}.
template <class V, class Target>
std::pair<MPoly<Target>, MPoly<Target>> substitute_poly(const MPoly<V>& p,
                                                        std::span<const Frac<Target>> images,
                                                        PowerCache<V, Target>& cache) {
  const std::size_t n = p.nvars();
  const std::size_t m = images.front().nvars();
  std::vector<int> maxdeg(n);
  for (std::size_t k = 0; k < n; ++k) maxdeg[k] = std::max(0, p.degree_in(k));
  MPoly<Target> den = MPoly<Target>::constant(m, 1);
  for (std::size_t k = 0; k < n; ++k)
    if (maxdeg[k] > 0 && !images[k].den().is_constant())
      den *= cache.get(cache.dens, k, static_cast<unsigned>(maxdeg[k]), images[k].den());
  MPoly<Target> num(m);
  for (const auto& t : p.terms()) {
    MPoly<Target> term = MPoly<Target>::constant(m, t.coeff);
    for (std::size_t k = 0; k < n; ++k) {
      const unsigned e = t.mono.exps[k];
      if (maxdeg[k] == 0) continue;
      if (e > 0) term *= cache.get(cache.nums, k, e, images[k].num());
      if (!images[k].den().is_constant() && static_cast<int>(e) < maxdeg[k])
        term *= cache.get(cache.dens, k, static_cast<unsigned>(maxdeg[k]) - e, images[k].den());
    }
    num += term;
  }
  return {std::move(num), std::move(den)};
}

}  // namespace

template <class V>
template <class Target>
Frac<Target> Frac<V>::substitute(std::span<const Frac<Target>> images) const {
  if (images.size() != nvars()) throw StructuralError("substitution has wrong number of images");
  if (images.empty()) return Frac<Target>::constant(0, num_.constant_term());
  PowerCache<V, Target> cache;
  cache.nums.resize(nvars());
  cache.dens.resize(nvars());
  auto [nn, nd] = substitute_poly<V, Target>(num_, images, cache);
  auto [dn, dd] = substitute_poly<V, Target>(den_, images, cache);
  if (dn.is_zero()) throw ArithmeticError("substitution makes the denominator vanish");
  return Frac<Target>(nn * dd, dn * nd);
}

template <class V>
Frac<V> Frac<V>::raise_variable(std::size_t i, unsigned e) const {
  return Frac(num_.raise_variable(i, e), den_.raise_variable(i, e));
}

namespace {

template <class V>
std::string monomial_text(const Monomial& m, std::size_t nvars) {
  std::string s;
  for (std::size_t k = 0; k < nvars; ++k) {
    if (m.exps[k] == 0) continue;
    if (!s.empty()) s += '*';
    s += V::symbol;
    s += std::to_string(k + 1);
    if (m.exps[k] > 1) s += '^' + std::to_string(m.exps[k]);
  }
  return s;
}

// Text of a polynomial whose coefficients are integers.
template <class V>
std::string integer_poly_text(const std::vector<std::pair<Monomial, mpz_class>>& terms,
                              std::size_t nvars) {
  if (terms.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [mono, c] : terms) {
    const bool neg = c < 0;
    const mpz_class a = abs(c);
    if (neg) s += '-';
    else if (!first) s += '+';
    first = false;
    const std::string mt = monomial_text<V>(mono, nvars);
    if (mt.empty()) s += a.get_str();
    else if (a == 1) s += mt;
    else s += a.get_str() + '*' + mt;
  }
  return s;
}

template <class V>
bool needs_parens(const std::vector<std::pair<Monomial, mpz_class>>& terms) {
  if (terms.size() > 1) return true;
  return terms.size() == 1 && terms[0].first.degree > 0 && terms[0].second != 1;
}

}  // namespace

template <class V>
std::string Frac<V>::to_string() const {
  // Common integer scale: lcm of denominators over gcd of numerators.
  mpz_class l = 1, g = 0;
  for (const auto* p : {&num_, &den_})
    for (const auto& t : p->terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  for (const auto* p : {&num_, &den_})
    for (const auto& t : p->terms()) {
      const mpz_class v = t.coeff.get_num() * (l / t.coeff.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
  if (g == 0) g = 1;
  auto scaled = [&](const MPoly<V>& p) {
    std::vector<std::pair<Monomial, mpz_class>> out;
    for (const auto& t : p.terms())
      out.emplace_back(t.mono, mpz_class(t.coeff.get_num() * (l / t.coeff.get_den()) / g));
    return out;
  };
  const auto n = scaled(num_);
  const auto d = scaled(den_);
  const std::size_t nv = nvars();
  if (d.size() == 1 && d[0].first.degree == 0 && d[0].second == 1) return integer_poly_text<V>(n, nv);
  std::string ns = integer_poly_text<V>(n, nv);
  std::string ds = integer_poly_text<V>(d, nv);
  if (n.size() > 1) ns = '(' + ns + ')';
  if (needs_parens<V>(d)) ds = '(' + ds + ')';
  return ns + '/' + ds;
}

// --------------------------------------------------------- instantiations

template class MPoly<ParamVars>;
template class MPoly<XVars>;
template class MPoly<MixedVars>;
template class Frac<ParamVars>;
template class Frac<XVars>;
template class Frac<MixedVars>;
template MPoly<ParamVars> gcd(const MPoly<ParamVars>&, const MPoly<ParamVars>&);
template MPoly<XVars> gcd(const MPoly<XVars>&, const MPoly<XVars>&);
template MPoly<MixedVars> gcd(const MPoly<MixedVars>&, const MPoly<MixedVars>&);

template MPoly<MixedVars> MPoly<ParamVars>::embed<MixedVars>(std::size_t,
                                                             std::span<const std::size_t>) const;
template MPoly<MixedVars> MPoly<XVars>::embed<MixedVars>(std::size_t,
                                                         std::span<const std::size_t>) const;
template Frac<XVars> Frac<XVars>::substitute<XVars>(std::span<const Frac<XVars>>) const;
template Frac<MixedVars> Frac<XVars>::substitute<MixedVars>(std::span<const Frac<MixedVars>>) const;
template Frac<MixedVars> Frac<MixedVars>::substitute<MixedVars>(std::span<const Frac<MixedVars>>) const;
template Frac<ParamVars> Frac<ParamVars>::substitute<ParamVars>(
    std::span<const Frac<ParamVars>>) const;

}  // namespace dval
