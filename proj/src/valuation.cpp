#include "dval/valuation.hpp"

#include <algorithm>

namespace dval {

long ValuationSpec::effective_prec() const {
  long p = TSeries::kExactPrec;
  for (const auto& e : psi) p = std::min(p, e.prec());
  return p;
}

void check_center(const ValuationSpec& spec) {
  for (std::size_t i = 0; i < spec.psi.size(); ++i) {
    const Value o = ord(spec.psi[i]);
    if (!o.is_exact() || o.amount < 1)
      throw ContractError("center condition violated: Psi(X" + std::to_string(i + 1) + ") must have order >= 1 (" +
                          (o.is_exact() ? "it has a nonzero constant term" : "it is indistinguishable from 0") +
                          "), so the center would not be the maximal ideal");
  }
}

TSeries eval_poly(const ValuationSpec& spec, const XPoly& p) {
  if (p.nvars() != spec.n) throw StructuralError("element arity does not match the valuation");
  const TSeries one = TSeries::constant(RatFunc::constant(spec.s, 1));
  TSeries sum = TSeries(spec.s, TSeries::kExactPrec);
  std::vector<std::vector<TSeries>> powers(spec.n);
  auto power = [&](std::size_t i, unsigned e) -> const TSeries& {
    auto& row = powers[i];
    if (row.empty()) row.push_back(one);
    while (row.size() <= e) row.push_back(row.back() * spec.psi[i]);
    return row[e];
  };
  for (const auto& t : p.terms()) {
    TSeries term = TSeries::constant(RatFunc::constant(spec.s, t.coeff));
    for (std::size_t i = 0; i < spec.n; ++i)
      if (t.mono.exps[i] > 0) term = term * power(i, t.mono.exps[i]);
    sum = sum + term;
  }
  return sum;
}

TSeries eval_psi(const ValuationSpec& spec, const KElem& f) {
  if (f.is_zero()) throw ContractError("eval_psi of the zero element");
  const TSeries num = eval_poly(spec, f.num());
  if (f.den().is_constant()) return num.scaled(RatFunc::constant(spec.s, 1 / f.den().constant_term()));
  const TSeries den = eval_poly(spec, f.den());
  const Value o = ord(den);
  if (!o.is_exact())
    throw KernelSuspicionError("Psi(denominator) is indistinguishable from 0 at precision " +
                               std::to_string(den.prec()));
  const TSeries unit = den.times_t(-o.amount);
  return (num * invert_unit(unit, std::max<long>(spec.prec, 1))).times_t(-o.amount);
}

namespace {

struct Orders {
  Value num, den;
  RatFunc lead_num, lead_den;
};

Orders orders(const ValuationSpec& spec, const KElem& f) {
  const TSeries a = eval_poly(spec, f.num());
  const TSeries b = eval_poly(spec, f.den());
  Orders o{ord(a), ord(b), RatFunc(spec.s), RatFunc(spec.s)};
  if (o.num.is_exact()) o.lead_num = leading_coeff(a);
  if (o.den.is_exact()) o.lead_den = leading_coeff(b);
  return o;
}

// Escalate until both orders are exact or the cap is reached.
Orders escalate(const ValuationSpec& spec, const KElem& f, long cap, const EscalationLog& log,
                long* reached) {
  ValuationSpec cur = spec;
  for (;;) {
    Orders o = orders(cur, f);
    *reached = std::min(cur.effective_prec(), std::max(cur.prec, cap));
    if ((o.num.is_exact() && o.den.is_exact()) || !cur.can_raise() || cur.prec >= cap) return o;
    const long next = std::min(cur.prec * 2, cap);
    if (log) log("escalating precision " + std::to_string(cur.prec) + " -> " + std::to_string(next));
    cur = raise_precision(cur, next);
  }
}

}  // namespace

Value value(const ValuationSpec& spec, const KElem& f, long prec_cap, const EscalationLog& log) {
  if (f.is_zero()) throw ContractError("value of the zero element");
  long reached = 0;
  const Orders o = escalate(spec, f, prec_cap, log, &reached);
  if (!o.den.is_exact())
    throw KernelSuspicionError("denominator is indistinguishable from 0 at the precision cap");
  if (o.num.is_exact()) return Value::exact(o.num.amount - o.den.amount);
  const long bound = std::min(o.num.amount, std::max(reached, prec_cap));
  return Value::at_least(bound - o.den.amount, true);
}

RatFunc residue(const ValuationSpec& spec, const KElem& f, long prec_cap) {
  const ResidueDatum d = initial_datum(spec, f, prec_cap);
  if (!d.value.is_exact()) throw IndeterminateError("value is only known as " + d.value.to_string());
  if (d.value.amount != 0) throw ContractError("residue needs value 0, got " + d.value.to_string());
  return *d.residue;
}

ResidueDatum initial_datum(const ValuationSpec& spec, const KElem& f, long prec_cap) {
  if (f.is_zero()) throw ContractError("initial datum of the zero element");
  long reached = 0;
  const Orders o = escalate(spec, f, prec_cap, {}, &reached);
  if (!o.den.is_exact())
    throw KernelSuspicionError("denominator is indistinguishable from 0 at the precision cap");
  if (!o.num.is_exact()) {
    const long bound = std::min(o.num.amount, std::max(reached, prec_cap));
    return {Value::at_least(bound - o.den.amount, true), std::nullopt};
  }
  return {Value::exact(o.num.amount - o.den.amount), o.lead_num / o.lead_den};
}

Value entry_value(const ValuationSpec& spec, std::size_t i, long prec_cap) {
  if (i >= spec.n) throw StructuralError("entry index out of range");
  return value(spec, KElem::variable(spec.n, i), prec_cap);
}

ValuationSpec raise_precision(const ValuationSpec& spec, long new_prec) {
  if (new_prec <= spec.prec)
    throw ContractError("raise_precision needs a larger precision than " + std::to_string(spec.prec));
  if (!spec.regen) throw PrecisionCeilingError("the spec has no source able to emit more terms");
  ValuationSpec out = spec;
  out.prec = new_prec;
  out.psi = (*spec.regen)(new_prec);
  for (auto& e : out.psi) e = e.truncated(new_prec);
  return out;
}

ValuationSpec ensure_precision(const ValuationSpec& spec, long target) {
  if (spec.effective_prec() >= target) return spec;
  if (!spec.regen) throw PrecisionCeilingError("the spec has no source able to emit more terms");
  ValuationSpec out = spec;
  out.prec = std::max(spec.prec, target);
  out.psi = (*spec.regen)(out.prec);
  for (auto& e : out.psi) e = e.truncated(out.prec);
  return out;
}

std::string describe(const ValuationSpec& spec) {
  std::string s;
  for (std::size_t i = 0; i < spec.n; ++i)
    s += "X" + std::to_string(i + 1) + " -> " + spec.psi[i].to_string() + "\n";
  return s;
}

}  // namespace dval
