#include "dval/tseries.hpp"

#include <algorithm>

namespace dval {

namespace {

// Precision arithmetic saturating at the exact sentinel.
long padd(long p, long d) {
  if (p >= TSeries::kExactPrec || d >= TSeries::kExactPrec) return TSeries::kExactPrec;
  return p + d;
}

std::string coeff_text(const RatFunc& c) {
  std::string s = c.to_string();
  const bool simple = s.find_first_of("+-/*", s[0] == '-' ? 1 : 0) == std::string::npos;
  return simple ? s : '(' + s + ')';
}

}  // namespace

std::string Value::to_string() const {
  return (is_exact() ? "Exact " : "AtLeast ") + std::to_string(amount);
}

TSeries::TSeries(std::size_t nparams, long prec) : nparams_(nparams), prec_(std::min(prec, kExactPrec)) {}

TSeries TSeries::constant(const RatFunc& c, long prec) { return monomial(c, 0, prec); }

TSeries TSeries::monomial(const RatFunc& c, long degree, long prec) {
  TSeries s(c.nvars(), prec);
  if (!c.is_zero() && degree < s.prec_) s.terms_.emplace(degree, c);
  return s;
}

TSeries TSeries::from_terms(std::size_t nparams, const std::map<long, RatFunc>& terms, long prec) {
  TSeries s(nparams, prec);
  for (const auto& [d, c] : terms) {
    if (c.nvars() != nparams) throw StructuralError("series coefficient has wrong parameter count");
    if (d < s.prec_ && !c.is_zero()) s.terms_.emplace(d, c);
  }
  return s;
}

RatFunc TSeries::coeff(long degree) const {
  if (degree >= prec_) throw IndeterminateError("coefficient beyond the known precision");
  const auto it = terms_.find(degree);
  return it == terms_.end() ? RatFunc(nparams_) : it->second;
}

long TSeries::order_bound() const noexcept { return terms_.empty() ? prec_ : terms_.begin()->first; }

void TSeries::check(const TSeries& o) const {
  if (nparams_ != o.nparams_) throw StructuralError("series parameter count mismatch");
}

TSeries TSeries::operator-() const {
  TSeries r = *this;
  for (auto& [d, c] : r.terms_) c = -c;
  return r;
}

TSeries operator+(const TSeries& a, const TSeries& b) {
  a.check(b);
  TSeries r(a.nparams_, std::min(a.prec_, b.prec_));
  for (const auto& [d, c] : a.terms_)
    if (d < r.prec_) r.terms_.emplace(d, c);
  for (const auto& [d, c] : b.terms_) {
    if (d >= r.prec_) break;
    auto [it, fresh] = r.terms_.emplace(d, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) r.terms_.erase(it);
    }
  }
  return r;
}

TSeries operator-(const TSeries& a, const TSeries& b) { return a + (-b); }

TSeries operator*(const TSeries& a, const TSeries& b) {
  a.check(b);
  const long prec = std::min(padd(a.prec_, b.order_bound()), padd(b.prec_, a.order_bound()));
  TSeries r(a.nparams_, prec);
  for (const auto& [da, ca] : a.terms_) {
    for (const auto& [db, cb] : b.terms_) {
      const long d = da + db;
      if (d >= r.prec_) break;
      auto [it, fresh] = r.terms_.emplace(d, ca * cb);
      if (!fresh) it->second += ca * cb;
    }
  }
  std::erase_if(r.terms_, [](const auto& kv) { return kv.second.is_zero(); });
  return r;
}

TSeries TSeries::scaled(const RatFunc& c) const {
  if (c.is_zero()) return TSeries(nparams_, prec_);
  TSeries r = *this;
  for (auto& [d, x] : r.terms_) x *= c;
  return r;
}

TSeries TSeries::pow(unsigned e) const {
  TSeries result = constant(RatFunc::constant(nparams_, 1));
  TSeries base = *this;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

TSeries TSeries::truncated(long p) const {
  if (p >= prec_) return *this;
  TSeries r(nparams_, p);
  for (const auto& [d, c] : terms_) {
    if (d >= p) break;
    r.terms_.emplace(d, c);
  }
  return r;
}

TSeries TSeries::times_t(long d) const {
  TSeries r(nparams_, padd(prec_, d));
  for (const auto& [k, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), k + d, c);
  return r;
}

bool operator==(const TSeries& a, const TSeries& b) {
  if (a.nparams_ != b.nparams_ || a.prec_ != b.prec_ || a.terms_.size() != b.terms_.size()) return false;
  auto it = b.terms_.begin();
  for (const auto& [d, c] : a.terms_) {
    if (d != it->first || !(c == it->second)) return false;
    ++it;
  }
  return true;
}

std::string TSeries::to_string() const {
  std::string s;
  for (const auto& [d, c] : terms_) {
    if (!s.empty()) s += " + ";
    if (d == 0) {
      s += coeff_text(c);
      continue;
    }
    const std::string ct = coeff_text(c);
    if (ct != "1") s += ct + '*';
    s += d == 1 ? std::string("t") : "t^" + (d < 0 ? '(' + std::to_string(d) + ')' : std::to_string(d));
  }
  if (!is_exact()) s += (s.empty() ? "" : " + ") + std::string("O(t^") + std::to_string(prec_) + ")";
  if (s.empty()) s = "0";
  return s;
}

Value ord(const TSeries& a) {
  if (a.terms().empty()) return Value::at_least(a.prec());
  return Value::exact(a.terms().begin()->first);
}

TSeries invert_unit(const TSeries& a, long target_prec) {
  const Value o = ord(a);
  if (!o.is_exact() || o.amount != 0) throw NotUnitError("series is not a unit (order is not 0)");
  const RatFunc b0 = a.terms().begin()->second.inverse();
  if (a.terms().size() == 1 && a.is_exact()) return TSeries::constant(b0);
  long prec = a.prec();
  if (a.is_exact()) {
    if (target_prec <= 0) throw StructuralError("inverting an exact unit needs a target precision");
    prec = target_prec;
  }
  std::map<long, RatFunc> out;
  std::vector<RatFunc> b;
  b.reserve(static_cast<std::size_t>(prec));
  b.push_back(b0);
  out.emplace(0, b0);
  for (long k = 1; k < prec; ++k) {
    RatFunc acc(a.nparams());
    for (const auto& [i, ai] : a.terms()) {
      if (i == 0) continue;
      if (i > k) break;
      const RatFunc& bk = b[static_cast<std::size_t>(k - i)];
      if (!bk.is_zero()) acc += ai * bk;
    }
    RatFunc bk = -(acc * b0);
    if (!bk.is_zero()) out.emplace(k, bk);
    b.push_back(std::move(bk));
  }
  return TSeries::from_terms(a.nparams(), out, prec);
}

TSeries shift(const TSeries& a, long d) {
  if (d < 0 && !a.terms().empty() && a.terms().begin()->first + d < 0)
    throw StructuralError("shift would create negative degrees");
  return a.times_t(d);
}

RatFunc leading_coeff(const TSeries& a) {
  if (a.terms().empty()) throw IndeterminateError("leading coefficient of a series indistinguishable from 0");
  return a.terms().begin()->second;
}

}  // namespace dval
