#include "dval/algorithms.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <tuple>
#include <type_traits>

namespace dval {

namespace {

// Raise spec until every entry has a certified order, or fail.
std::vector<long> certify_values(ValuationSpec& spec, long cap) {
  for (;;) {
    std::vector<long> vals;
    bool all = true;
    for (const auto& e : spec.psi) {
      const Value o = ord(e);
      all = all && o.is_exact();
      vals.push_back(o.amount);
    }
    if (all) return vals;
    if (!spec.can_raise() || spec.prec >= cap)
      throw KernelSuspicionError("an entry is indistinguishable from 0 at precision " + std::to_string(spec.prec));
    spec = raise_precision(spec, std::min(spec.prec * 2, cap));
  }
}

// Smaller is simpler: used to pick among equally valued divisors.
std::tuple<int, std::size_t, std::string> simplicity(const RatFunc& q) {
  return {q.num().total_degree() + q.den().total_degree(), q.num().size() + q.den().size(), q.to_string()};
}

RatFunc lead_ratio(const ValuationSpec& spec, std::size_t i, std::size_t j, long power = 1) {
  return leading_coeff(spec.psi[i]) / leading_coeff(spec.psi[j]).pow(static_cast<int>(power));
}

// ---- dense linear algebra over Q and Delta

template <class F>
bool is_zero_elem(const F& x) {
  if constexpr (std::is_same_v<F, Rat>) return x == 0;
  else return x.is_zero();
}

// Row echelon in place; returns the rank and the pivot columns.
template <class F>
std::size_t echelon(std::vector<std::vector<F>>& a, std::vector<std::size_t>* pivots = nullptr) {
  std::size_t rank = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && is_zero_elem(a[p][c])) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    const F inv = F(1) / a[rank][c];
    for (std::size_t k = c; k < cols; ++k) a[rank][k] = a[rank][k] * inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || is_zero_elem(a[r][c])) continue;
      const F f = a[r][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] = a[r][k] - f * a[rank][k];
    }
    if (pivots) pivots->push_back(c);
    ++rank;
  }
  return rank;
}

// Rank over Delta. Field operations on RatFunc need a concrete arity, so the
// generic template above is specialised by hand here.
std::size_t rank_delta(std::vector<std::vector<RatFunc>> a) {
  std::size_t rank = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][c].is_zero()) continue;
      const RatFunc f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

// One nonzero kernel vector of the rows, if any.
std::optional<std::vector<Rat>> kernel_vector(std::vector<std::vector<Rat>> a, std::size_t cols) {
  std::vector<std::size_t> piv;
  const std::size_t rank = echelon(a, &piv);
  if (rank == cols) return std::nullopt;
  std::size_t free = 0;
  while (std::find(piv.begin(), piv.end(), free) != piv.end()) ++free;
  std::vector<Rat> x(cols, Rat(0));
  x[free] = 1;
  for (std::size_t r = 0; r < rank; ++r) x[piv[r]] = -a[r][free];
  return x;
}

// Solve a x = b; nullopt when inconsistent. Free variables are set to 0.
std::optional<std::vector<Rat>> solve(std::vector<std::vector<Rat>> a, const std::vector<Rat>& b) {
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t r = 0; r < a.size(); ++r) a[r].push_back(b[r]);
  std::vector<std::size_t> piv;
  const std::size_t rank = echelon(a, &piv);
  if (rank > 0 && piv[rank - 1] == cols) return std::nullopt;
  std::vector<Rat> x(cols, Rat(0));
  for (std::size_t r = 0; r < rank; ++r) x[piv[r]] = a[r][cols];
  return x;
}

std::vector<Rat> random_point(std::size_t s, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-97, 97);
  std::vector<Rat> p(s);
  for (auto& x : p) x = d(rng);
  return p;
}

// All exponent vectors in k variables of total degree <= r.
std::vector<std::vector<unsigned>> exponents_upto(std::size_t k, unsigned r) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> e(k, 0);
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i == k) {
      out.push_back(e);
      return;
    }
    for (unsigned x = 0; x <= left; ++x) {
      e[i] = x;
      self(self, i + 1, left - x);
    }
    e[i] = 0;
  };
  rec(rec, 0, r);
  return out;
}

}  // namespace

// ------------------------------------------------------------ gcd_normalize

GcdResult gcd_normalize(const ValuationSpec& spec, long prec_cap) {
  GcdResult out{spec, TransformLog(spec.n), 0};
  for (;;) {
    const std::vector<long> vals = certify_values(out.spec, prec_cap);
    const long a = *std::min_element(vals.begin(), vals.end());
    if (a < 1) throw ContractError("entries must have positive value");
    std::size_t j = 0;
    while (j < vals.size() && vals[j] == a) ++j;
    if (j == vals.size()) {
      out.common = a;
      return out;
    }
    // divisor: among the minimal entries the one leaving the simplest quotient
    std::size_t best = spec.n;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] != a) continue;
      if (best == spec.n || simplicity(lead_ratio(out.spec, j, i)) < simplicity(lead_ratio(out.spec, j, best)))
        best = i;
    }
    out.spec = out.log.apply(out.spec, TransformStep::monoidal(best, j), prec_cap);
  }
}

// --------------------------------------------------------- find_uniformizer

std::string UniformizerResult::status_string() const {
  switch (status) {
    case Status::Found: return "Found(" + std::to_string(index + 1) + ")";
    case Status::GcdPlateau: return "GcdPlateau(" + std::to_string(plateau) + ")";
    case Status::IterationCap: return "IterationCap";
  }
  return "";
}

UniformizerResult find_uniformizer(const ValuationSpec& spec, std::size_t max_iters, long prec_cap) {
  UniformizerResult r;
  r.spec_after = spec;
  r.log = TransformLog(spec.n);
  std::vector<bool> exhausted(spec.n, false);
  long d = 0;
  for (std::size_t sweep = 0; sweep < max_iters; ++sweep) {
    r.sweeps = sweep + 1;
    GcdResult g = gcd_normalize(r.spec_after, prec_cap);
    r.log.append(g.log);
    r.spec_after = std::move(g.spec);
    d = g.common;
    r.min_history.push_back(d);
    bool changed = false;
    for (std::size_t i = 1; i < spec.n; ++i) {
      if (exhausted[i]) continue;
      const RatFunc c = lead_ratio(r.spec_after, i, 0);
      // at value 1 only residues lying in k are removed
      if (d == 1 && !c.is_constant()) continue;
      CoordTerm term{c, 1, std::nullopt};
      if (c.is_constant()) term.rep = KElem::constant(spec.n, c.constant_value());
      try {
        r.spec_after = r.log.apply(r.spec_after, TransformStep::coord_change(i, {term}), prec_cap);
        changed = true;
      } catch (const KernelSuspicionError&) {
        exhausted[i] = true;
      }
    }
    if (!changed) {
      if (d == 1) {
        r.status = UniformizerResult::Status::Found;
        r.index = 0;
      } else {
        r.status = UniformizerResult::Status::GcdPlateau;
        r.plateau = d;
      }
      return r;
    }
  }
  // the cap also stops normalisation that keeps finding rational residues
  GcdResult g = gcd_normalize(r.spec_after, prec_cap);
  r.log.append(g.log);
  r.spec_after = std::move(g.spec);
  r.min_history.push_back(g.common);
  if (g.common == 1) {
    r.status = UniformizerResult::Status::Found;
    r.index = 0;
  } else {
    r.status = UniformizerResult::Status::IterationCap;
  }
  return r;
}

// -------------------------------------------------------- transcendence

std::size_t jacobian_rank(std::span<const RatFunc> gens) {
  if (gens.empty()) return 0;
  const std::size_t s = gens[0].nvars();
  std::vector<std::vector<RatFunc>> rows;
  for (const auto& g : gens) {
    std::vector<RatFunc> row;
    for (std::size_t k = 0; k < s; ++k) row.push_back(g.derivative(k));
    rows.push_back(std::move(row));
  }
  return rank_delta(std::move(rows));
}

bool is_algebraic_over(std::span<const RatFunc> gens, const RatFunc& r, unsigned trials, std::uint64_t seed) {
  if (r.is_constant()) return true;
  const std::size_t s = r.nvars();
  for (const auto& g : gens)
    if (g.nvars() != s) throw StructuralError("generators and element live over different parameters");
  std::vector<RatFunc> aug(gens.begin(), gens.end());
  aug.push_back(r);
  const std::size_t base = jacobian_rank(gens);
  if (base == s) return true;
  // screen: a numeric rank above the symbolic base rank proves transcendence
  std::mt19937_64 rng(seed);
  for (unsigned t = 0; t < trials; ++t) {
    const auto p = random_point(s, rng);
    try {
      std::vector<std::vector<Rat>> m;
      for (const auto& g : aug) {
        std::vector<Rat> row;
        for (std::size_t k = 0; k < s; ++k) row.push_back(g.derivative(k).evaluate(p));
        m.push_back(std::move(row));
      }
      if (echelon(m) > base) return false;
      break;
    } catch (const PoleError&) {
    }
  }
  return jacobian_rank(aug) == base;
}

// ---------------------------------------------- first transcendental residue

FirstTranscendental first_transcendental_residue(const ValuationSpec& spec, std::size_t max_steps, long prec_cap) {
  FirstTranscendental out{spec, TransformLog(spec.n), RatFunc(spec.s), {}, {}};
  if (spec.n < 2) throw ContractError("a transcendental residue needs at least two variables");
  std::vector<long> vals = certify_values(out.spec, prec_cap);
  const long alpha = vals[0];
  for (std::size_t i = 1; i < spec.n; ++i) {
    std::vector<std::pair<RatFunc, long>> prelim;
    for (std::size_t step = 0; step <= max_steps; ++step) {
      const Value a = ord(out.spec.psi[i]);
      if (!a.is_exact()) break;
      if (a.amount != alpha) {
        if (a.amount < alpha || a.amount % alpha != 0)
          throw ContractError("entries must share the value of Y1 (Y" + std::to_string(i + 1) + " has " +
                              std::to_string(a.amount) + ")");
        for (long k = 1; k < a.amount / alpha; ++k)
          out.spec = out.log.apply(out.spec, TransformStep::monoidal(0, i), prec_cap);
      }
      const RatFunc c = lead_ratio(out.spec, i, 0);
      if (!c.is_constant()) {
        if (i != 1) out.spec = out.log.apply(out.spec, TransformStep::swap(spec.n, 1, i), prec_cap);
        out.residue = c;
        out.prelim = std::move(prelim);
        return out;
      }
      if (step == max_steps) break;
      out.base_algebraics.push_back(c);
      prelim.push_back({c, 1});
      try {
        out.spec = out.log.apply(
            out.spec,
            TransformStep::coord_change(i, {{c, 1, KElem::constant(spec.n, c.constant_value())}}), prec_cap);
      } catch (const KernelSuspicionError&) {
        break;
      }
    }
  }
  throw InconclusiveError("no variable produced a transcendental residue within the caps");
}

// ----------------------------------------------------- build_residue_field

namespace {

struct ExactGen {
  RatFunc u;
  KElem rep;
};

// c as a polynomial of degree <= 3 in generators with exact representatives.
std::optional<KElem> express(const RatFunc& c, const std::vector<ExactGen>& gens, std::size_t n) {
  if (c.is_constant()) return KElem::constant(n, c.constant_value());
  if (gens.empty()) return std::nullopt;
  const auto expos = exponents_upto(gens.size(), 3);
  std::mt19937_64 rng(0xa11ce);
  std::vector<std::vector<Rat>> a;
  std::vector<Rat> b;
  std::size_t attempts = 0;
  while (a.size() < expos.size() + 4 && attempts++ < 4 * expos.size() + 40) {
    const auto p = random_point(c.nvars(), rng);
    try {
      std::vector<Rat> gv;
      for (const auto& g : gens) gv.push_back(g.u.evaluate(p));
      std::vector<Rat> row;
      for (const auto& e : expos) {
        Rat x = 1;
        for (std::size_t k = 0; k < e.size(); ++k)
          for (unsigned q = 0; q < e[k]; ++q) x *= gv[k];
        row.push_back(x);
      }
      const Rat rhs = c.evaluate(p);
      a.push_back(std::move(row));
      b.push_back(rhs);
    } catch (const PoleError&) {
    }
  }
  const auto x = solve(a, b);
  if (!x) return std::nullopt;
  RatFunc check(c.nvars());
  KElem rep(n);
  for (std::size_t m = 0; m < expos.size(); ++m) {
    if ((*x)[m] == 0) continue;
    RatFunc t = RatFunc::constant(c.nvars(), (*x)[m]);
    KElem r = KElem::constant(n, (*x)[m]);
    for (std::size_t k = 0; k < gens.size(); ++k) {
      if (expos[m][k] == 0) continue;
      t *= gens[k].u.pow(static_cast<int>(expos[m][k]));
      r *= gens[k].rep.pow(static_cast<int>(expos[m][k]));
    }
    check += t;
    rep += r;
  }
  if (!(check == c)) return std::nullopt;
  return rep;
}

// Psi(rep) == u as a constant series, at the working precision.
bool represents_exactly(const ValuationSpec& original, const KElem& rep, const RatFunc& u) {
  try {
    const TSeries d = eval_psi(original, rep) - TSeries::constant(u);
    return !ord(d).is_exact();
  } catch (const Error&) {
    return false;
  }
}

struct ChainOutcome {
  enum class Kind { Transcendental, Exhausted, CapReached, Situation1 };
  Kind kind = Kind::Exhausted;
  std::vector<std::pair<RatFunc, long>> terms;
  RatFunc w;
  long value = 0;  // value of the final Z
};

ChainOutcome run_chain(const ValuationSpec& spec, std::size_t k, const std::vector<RatFunc>& gens, std::size_t cap) {
  ChainOutcome out;
  const TSeries& y1 = spec.psi[0];
  const long alpha = ord(y1).amount;
  const RatFunc l1 = leading_coeff(y1);
  TSeries z = spec.psi[k];
  for (std::size_t step = 0; step < cap; ++step) {
    const Value a = ord(z);
    if (!a.is_exact()) {
      out.kind = ChainOutcome::Kind::Exhausted;
      return out;
    }
    out.value = a.amount;
    if (a.amount % alpha != 0) {
      out.kind = ChainOutcome::Kind::Situation1;
      return out;
    }
    const long q = a.amount / alpha;
    const RatFunc w = leading_coeff(z) / l1.pow(static_cast<int>(q));
    if (!is_algebraic_over(gens, w)) {
      out.kind = ChainOutcome::Kind::Transcendental;
      out.w = w;
      return out;
    }
    out.terms.push_back({w, q});
    z = z - y1.pow(static_cast<unsigned>(q)).scaled(w);
  }
  out.kind = ChainOutcome::Kind::CapReached;
  return out;
}

std::vector<CoordTerm> with_reps(const std::vector<std::pair<RatFunc, long>>& terms, const std::vector<ExactGen>& exact,
                                 std::size_t n) {
  std::vector<CoordTerm> out;
  for (const auto& [c, m] : terms) out.push_back({c, static_cast<unsigned>(m), express(c, exact, n)});
  return out;
}

}  // namespace

ResidueFieldReport build_residue_field(const ValuationSpec& spec, const ResidueFieldOptions& opts) {
  ResidueFieldReport rep;
  rep.original = spec;
  rep.log = TransformLog(spec.n);
  ValuationSpec cur = spec;
  const std::size_t n = spec.n;
  for (;; ++rep.restarts) {
    rep.generators.clear();
    rep.base_algebraics.clear();
    UniformizerResult u = find_uniformizer(cur, opts.max_iters, opts.prec_cap);
    rep.log.append(u.log);
    cur = u.spec_after;
    rep.uniformizer = u.status;
    rep.spec_after = cur;
    if (u.status == UniformizerResult::Status::IterationCap) {
      rep.inconclusive = true;
      rep.note = "uniformizer search hit the iteration cap";
      return rep;
    }
    if (n == 1) break;

    FirstTranscendental ft;
    try {
      ft = first_transcendental_residue(cur, opts.chain_cap, opts.prec_cap);
    } catch (const InconclusiveError& e) {
      rep.inconclusive = true;
      rep.note = e.what();
      return rep;
    }
    rep.log.append(ft.log);
    cur = ft.spec;
    rep.base_algebraics = ft.base_algebraics;

    std::vector<RatFunc> gens{ft.residue};
    std::vector<ExactGen> exact;
    auto attach = [&](GeneratorEntry& e) {
      try {
        const KElem y = KElem::variable(n, e.index) / KElem::variable(n, 0);
        e.representative = rep.log.pullback(y);
        if (represents_exactly(spec, *e.representative, e.u)) exact.push_back({e.u, *e.representative});
      } catch (const RepresentativeMissingError&) {
      }
    };
    GeneratorEntry first;
    first.kind = GeneratorEntry::Kind::Transcendental;
    first.index = 1;
    first.prelim = ft.prelim;
    first.u = ft.residue;
    attach(first);
    rep.generators.push_back(first);

    bool restart = false;
    for (std::size_t k = 2; k < n && !restart; ++k) {
      const ChainOutcome c = run_chain(cur, k, gens, opts.chain_cap);
      GeneratorEntry e;
      e.index = k;
      try {
        switch (c.kind) {
          case ChainOutcome::Kind::Transcendental: {
            if (!c.terms.empty())
              cur = rep.log.apply(cur, TransformStep::coord_change(k, with_reps(c.terms, exact, n)), opts.prec_cap);
            const long alpha = ord(cur.psi[0]).amount;
            for (long q = 1; q < c.value / alpha; ++q)
              cur = rep.log.apply(cur, TransformStep::monoidal(0, k), opts.prec_cap);
            e.kind = GeneratorEntry::Kind::Transcendental;
            e.prelim = c.terms;
            e.u = c.w;
            attach(e);
            gens.push_back(c.w);
            break;
          }
          case ChainOutcome::Kind::Situation1:
            cur = rep.log.apply(cur, TransformStep::coord_change(k, with_reps(c.terms, exact, n)), opts.prec_cap);
            restart = true;
            break;
          case ChainOutcome::Kind::Exhausted:
          case ChainOutcome::Kind::CapReached:
            e.kind = GeneratorEntry::Kind::AlgebraicTower;
            e.chain = c.terms;
            for (std::size_t j = 0; j < c.terms.size() && j < opts.tower_depth; ++j)
              e.members.push_back(c.terms[j].first);
            e.truncated = true;
            break;
        }
      } catch (const KernelSuspicionError& err) {
        rep.inconclusive = true;
        rep.note = err.what();
      }
      if (!restart) rep.generators.push_back(std::move(e));
    }
    if (!restart) break;
    if (rep.restarts >= 16) {
      rep.inconclusive = true;
      rep.note = "too many restarts";
      break;
    }
  }
  rep.spec_after = cur;
  rep.dimension = static_cast<std::size_t>(
      std::count_if(rep.generators.begin(), rep.generators.end(),
                    [](const GeneratorEntry& g) { return g.kind == GeneratorEntry::Kind::Transcendental; }));
  rep.m = rep.dimension + 1;
  return rep;
}

// ------------------------------------------------------------ implicit ideal

namespace {

// Variable l with Psi(Y_l) = T_p t exactly, for each parameter p.
std::vector<std::optional<std::size_t>> linear_parameter_slots(const ValuationSpec& spec) {
  std::vector<std::optional<std::size_t>> out(spec.s);
  for (std::size_t p = 0; p < spec.s; ++p)
    for (std::size_t l = 1; l < spec.n && !out[p]; ++l)
      if (spec.psi[l].is_exact() && spec.psi[l] == TSeries::monomial(RatFunc::variable(spec.s, p), 1)) out[p] = l;
  return out;
}

}  // namespace

std::vector<TruncatedXSeries> implicit_ideal(const ResidueFieldReport& report) {
  std::vector<TruncatedXSeries> out;
  const ValuationSpec& spec = report.spec_after;
  const auto slots = linear_parameter_slots(spec);
  for (const auto& g : report.generators) {
    if (g.kind != GeneratorEntry::Kind::AlgebraicTower) continue;
    TruncatedXSeries w;
    w.nvars = spec.n;
    const long p = spec.psi[g.index].is_exact() ? spec.prec : std::min(spec.prec, spec.psi[g.index].prec());
    w.total_degree_prec = static_cast<unsigned>(std::max<long>(p, 0));
    w.truncated = true;
    w.add(Monomial::variable(g.index), RatFunc::constant(spec.s, 1));
    for (const auto& [c, q] : g.chain) {
      // a * prod T_p^e_p * Y1^q  ->  a * prod Y_{l(p)}^e_p * Y1^(q - sum e)
      Monomial mono = Monomial::variable(0, static_cast<unsigned>(q));
      RatFunc coeff = c;
      if (c.is_polynomial() && c.num().is_monomial()) {
        const auto& lead = c.num().leading();
        unsigned used = 0;
        bool ok = true;
        for (std::size_t p2 = 0; p2 < spec.s; ++p2)
          if (lead.mono.exps[p2] > 0) {
            ok = ok && slots[p2].has_value();
            used += lead.mono.exps[p2];
          }
        if (ok && used > 0 && used <= static_cast<unsigned>(q)) {
          Monomial m = Monomial::variable(0, static_cast<unsigned>(q) - used);
          for (std::size_t p2 = 0; p2 < spec.s; ++p2)
            if (lead.mono.exps[p2] > 0) m = m * Monomial::variable(*slots[p2], lead.mono.exps[p2]);
          mono = m;
          coeff = RatFunc::constant(spec.s, lead.coeff / c.den().constant_term());
        }
      }
      w.add(mono, -coeff);
    }
    out.push_back(std::move(w));
  }
  return out;
}

// -------------------------------------------------------- order functions

namespace {

XPoly normalize_witness(const XPoly& f) {
  if (f.is_zero()) return f;
  // primitive integer content, positive leading coefficient
  mpz_class den = 1, num = 0;
  for (const auto& t : f.terms()) {
    den = lcm(den, mpz_class(t.coeff.get_den()));
    num = gcd(num, mpz_class(t.coeff.get_num()));
  }
  XPoly g = f.scaled(Rat(den) / Rat(num));
  mpz_class c = 0;
  for (const auto& t : g.terms()) c = gcd(c, mpz_class(t.coeff.get_num()));
  g = g.scaled(Rat(1) / Rat(c));
  if (g.leading().coeff < 0) g = -g;
  return g;
}

// A Q-linear relation among the degree-r monomials evaluated at `leads`.
std::optional<XPoly> leading_dependency(const std::vector<RatFunc>& leads, unsigned r, std::uint64_t seed) {
  const std::size_t n = leads.size(), s = leads.empty() ? 0 : leads[0].nvars();
  const auto monos = monomials_of_degree(n, r);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<std::vector<Rat>> rows;
    std::size_t tries = 0;
    const std::size_t want = s == 0 ? 1 : monos.size() + 4;
    while (rows.size() < want && tries++ < 4 * want + 20) {
      const auto p = random_point(s, rng);
      try {
        std::vector<Rat> a;
        for (const auto& l : leads) a.push_back(l.evaluate(p));
        std::vector<Rat> row;
        for (const auto& m : monos) {
          Rat x = 1;
          for (std::size_t i = 0; i < n; ++i)
            for (unsigned e = 0; e < m.exps[i]; ++e) x *= a[i];
          row.push_back(x);
        }
        rows.push_back(std::move(row));
      } catch (const PoleError&) {
      }
    }
    const auto k = kernel_vector(rows, monos.size());
    if (!k) return std::nullopt;
    std::vector<XPoly::Term> terms;
    RatFunc check(s);
    for (std::size_t j = 0; j < monos.size(); ++j) {
      if ((*k)[j] == 0) continue;
      terms.push_back({monos[j], (*k)[j]});
      RatFunc t = RatFunc::constant(s, (*k)[j]);
      for (std::size_t i = 0; i < n; ++i)
        if (monos[j].exps[i] > 0) t *= leads[i].pow(monos[j].exps[i]);
      check += t;
    }
    if (check.is_zero()) return XPoly::from_terms(n, std::move(terms));
  }
  return std::nullopt;
}

}  // namespace

OrderCheck check_order_function(const ValuationSpec& spec, unsigned max_degree, std::size_t samples,
                                std::uint64_t seed, long prec_cap) {
  ValuationSpec cur = spec;
  const std::vector<long> vals = certify_values(cur, prec_cap);
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] != 1)
      throw ContractError("check_order_function needs every entry of value 1 (Y" + std::to_string(i + 1) +
                          " has " + std::to_string(vals[i]) + ")");
  std::vector<RatFunc> leads;
  for (const auto& e : cur.psi) leads.push_back(leading_coeff(e));
  OrderCheck out;
  for (unsigned r = 1; r <= max_degree; ++r) {
    for (std::size_t k = 0; k < samples; ++k) {
      const XPoly f = random_form(spec.n, r, 6, split_seed(seed, r * 100003ULL + k));
      const Value v = value(cur, KElem(f), prec_cap);
      ++out.samples;
      if (!(v == Value::exact(r))) {
        out.pass = false;
        out.degree = r;
        out.witness = normalize_witness(f);
        out.witness_value = value(cur, KElem(*out.witness), prec_cap);
        return out;
      }
    }
    if (auto dep = leading_dependency(leads, r, split_seed(seed, 7777 + r))) {
      out.pass = false;
      out.degree = r;
      out.witness = normalize_witness(*dep);
      out.witness_value = value(cur, KElem(*out.witness), prec_cap);
      return out;
    }
  }
  return out;
}

namespace {

ValuationSpec restrict_spec(const ValuationSpec& spec, const std::vector<std::size_t>& keep) {
  ValuationSpec out;
  out.name = spec.name;
  out.n = keep.size();
  out.s = spec.s;
  out.prec = spec.prec;
  for (std::size_t i : keep) out.psi.push_back(spec.psi[i]);
  if (spec.regen) {
    const auto prev = spec.regen;
    out.regen = std::make_shared<const Regenerator>([prev, keep](long p) {
      const auto all = (*prev)(p);
      std::vector<TSeries> psi;
      for (std::size_t i : keep) psi.push_back(all[i]);
      return psi;
    });
  }
  return out;
}

using MixedPoly = MPoly<MixedVars>;
using MixedFrac = Frac<MixedVars>;

MixedFrac embed_param(const RatFunc& c, std::size_t n, std::size_t total) {
  std::vector<std::size_t> map(c.nvars());
  for (std::size_t p = 0; p < map.size(); ++p) map[p] = n + p;
  return MixedFrac(c.num().embed<MixedVars>(total, map), c.den().embed<MixedVars>(total, map));
}

// Old variables of a step in terms of the new ones (slots 0..n-1, params after).
std::vector<MixedFrac> inverse_images(const TransformStep& step, std::size_t n, std::size_t s) {
  const std::size_t total = n + s;
  std::vector<MixedFrac> im;
  for (std::size_t k = 0; k < total; ++k) im.push_back(MixedFrac::variable(total, k));
  switch (step.kind) {
    case TransformStep::Kind::Monoidal:
      im[step.j] = im[step.i] * MixedFrac::variable(total, step.j);
      break;
    case TransformStep::Kind::CoordChange:
      for (const auto& t : step.terms)
        im[step.i] += embed_param(t.c, n, total) * MixedFrac::variable(total, 0).pow(static_cast<int>(t.m));
      break;
    case TransformStep::Kind::Permute:
      for (std::size_t k = 0; k < n; ++k) im[step.perm[k]] = MixedFrac::variable(total, k);
      break;
  }
  return im;
}

// p evaluated at num_i/den_i, multiplied by prod den_i^deg_i(p).
MixedPoly cleared_substitute(const XPoly& p, const std::vector<MixedPoly>& num, const std::vector<MixedPoly>& den) {
  const std::size_t n = p.nvars();
  const std::size_t total = num.empty() ? 0 : num[0].nvars();
  std::vector<int> deg(n);
  for (std::size_t i = 0; i < n; ++i) deg[i] = p.degree_in(i);
  std::map<std::pair<std::size_t, int>, MixedPoly> cache;
  auto power = [&](bool is_num, std::size_t i, int e) -> const MixedPoly& {
    const auto key = std::make_pair(i * 2 + (is_num ? 1 : 0), e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, (is_num ? num[i] : den[i]).pow(static_cast<unsigned>(e))).first->second;
  };
  MixedPoly out(total);
  for (const auto& t : p.terms()) {
    MixedPoly term = MixedPoly::constant(total, t.coeff);
    for (std::size_t i = 0; i < n; ++i) {
      const int e = t.mono.exps[i];
      if (e > 0) term *= power(true, i, e);
      if (deg[i] - e > 0) term *= power(false, i, deg[i] - e);
    }
    out += term;
  }
  return out;
}

// lex-min of (tower degrees, last tower first; total degree of the rest)
std::vector<long> rank_value(const MixedPoly& p, const std::vector<std::size_t>& towers, std::size_t n) {
  std::vector<long> best;
  for (const auto& t : p.terms()) {
    std::vector<long> v;
    for (auto it = towers.rbegin(); it != towers.rend(); ++it) v.push_back(t.mono.exps[*it]);
    long rest = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::find(towers.begin(), towers.end(), i) == towers.end()) rest += t.mono.exps[i];
    v.push_back(rest);
    if (best.empty() || v < best) best = v;
  }
  return best;
}

}  // namespace

ExtensionReport extend_to_order_function(const ResidueFieldReport& report, std::size_t samples, std::uint64_t seed,
                                         unsigned max_degree, std::size_t samples_per_degree) {
  if (report.inconclusive) throw InconclusiveError("residue field report is inconclusive: " + report.note);
  ExtensionReport x;
  const ValuationSpec& fin = report.spec_after;
  const std::size_t n = fin.n, s = fin.s;
  std::vector<std::size_t> towers, rest;
  for (std::size_t i = 0; i < n; ++i) {
    const bool tower = std::any_of(report.generators.begin(), report.generators.end(), [&](const GeneratorEntry& g) {
      return g.index == i && g.kind != GeneratorEntry::Kind::Transcendental;
    });
    (tower ? towers : rest).push_back(i);
  }
  if (towers.empty()) {
    x.case_number = 1;
    x.rank = 1;
    for (std::size_t i = 0; i < n; ++i) x.table.push_back({"Y" + std::to_string(i + 1), {1}});
    x.order = check_order_function(fin, max_degree, samples_per_degree, seed);
    return x;
  }
  x.case_number = 2;
  x.rank = towers.size() + 1;
  for (std::size_t i : rest) {
    std::vector<long> v(x.rank, 0);
    v.back() = 1;
    x.table.push_back({"Y" + std::to_string(i + 1), v});
  }
  for (std::size_t t = 0; t < towers.size(); ++t) {
    std::vector<long> v(x.rank, 0);
    v[towers.size() - 1 - t] = 1;
    x.table.push_back({"W" + std::to_string(towers[t] + 1), v});
  }
  x.implicit = implicit_ideal(report);
  x.order = check_order_function(restrict_spec(fin, rest), max_degree, samples_per_degree, seed);

  // original X in terms of the final Y (tower slots then read as W)
  const std::size_t total = n + s;
  std::vector<MixedFrac> xs;
  for (std::size_t k = 0; k < total; ++k) xs.push_back(MixedFrac::variable(total, k));
  for (const auto& step : report.log.steps()) {
    const auto im = inverse_images(step, n, s);
    for (std::size_t i = 0; i < n; ++i) xs[i] = xs[i].substitute<MixedVars>(im);
  }
  std::vector<MixedFrac> tower_im;
  for (std::size_t k = 0; k < total; ++k) tower_im.push_back(MixedFrac::variable(total, k));
  for (const auto& g : report.generators) {
    if (g.kind == GeneratorEntry::Kind::Transcendental) continue;
    for (const auto& [c, q] : g.chain)
      tower_im[g.index] += embed_param(c, n, total) * MixedFrac::variable(total, 0).pow(static_cast<int>(q));
  }
  std::vector<MixedPoly> num, den;
  for (std::size_t i = 0; i < n; ++i) {
    const MixedFrac f = xs[i].substitute<MixedVars>(tower_im);
    num.push_back(f.num());
    den.push_back(f.den());
  }

  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < samples; ++k) {
    const KElem f = random_kelem(n, 3, 3, rng);
    ++x.samples;
    Value v;
    try {
      v = value(report.original, f);
    } catch (const KernelSuspicionError&) {
      ++x.skipped;
      continue;
    }
    if (!v.is_exact()) {
      ++x.skipped;
      continue;
    }
    std::vector<long> a = rank_value(cleared_substitute(f.num(), num, den), towers, n);
    const std::vector<long> b = rank_value(cleared_substitute(f.den(), num, den), towers, n);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
    std::vector<long> want(x.rank, 0);
    want.back() = v.amount;
    if (a != want) {
      ++x.mismatches;
      if (x.mismatch_examples.size() < 3) x.mismatch_examples.push_back(f.to_string());
    }
  }
  return x;
}

}  // namespace dval
