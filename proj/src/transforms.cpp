#include "dval/transforms.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <sstream>

#include "dval/textform.hpp"

namespace dval {

// ------------------------------------------------------------------ steps

TransformStep TransformStep::monoidal(std::size_t i, std::size_t j) {
  TransformStep s;
  s.kind = Kind::Monoidal;
  s.i = i;
  s.j = j;
  return s;
}

TransformStep TransformStep::coord_change(std::size_t i, std::vector<CoordTerm> terms) {
  TransformStep s;
  s.kind = Kind::CoordChange;
  s.i = i;
  s.terms = std::move(terms);
  return s;
}

TransformStep TransformStep::permute(std::vector<std::size_t> perm) {
  TransformStep s;
  s.kind = Kind::Permute;
  s.perm = std::move(perm);
  return s;
}

TransformStep TransformStep::swap(std::size_t n, std::size_t a, std::size_t b) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::swap(p[a], p[b]);
  return permute(std::move(p));
}

void TransformStep::validate(std::size_t n) const {
  switch (kind) {
    case Kind::Monoidal:
      if (i >= n || j >= n) throw StructuralError("monoidal index out of range");
      if (i == j) throw StructuralError("monoidal transformation needs two distinct variables");
      break;
    case Kind::CoordChange: {
      if (i >= n) throw StructuralError("coordinate change index out of range");
      if (i == 0) throw StructuralError("coordinate change cannot target the first variable");
      unsigned last = 0;
      for (const auto& t : terms) {
        if (t.m <= last) throw StructuralError("coordinate change exponents must be strictly increasing");
        if (t.c.is_zero()) throw StructuralError("coordinate change coefficient must be nonzero");
        last = t.m;
      }
      break;
    }
    case Kind::Permute: {
      if (perm.size() != n) throw StructuralError("permutation has the wrong length");
      std::vector<bool> seen(n, false);
      for (std::size_t p : perm) {
        if (p >= n || seen[p]) throw StructuralError("not a permutation");
        seen[p] = true;
      }
      break;
    }
  }
}

std::string TransformStep::to_string() const {
  std::string s;
  switch (kind) {
    case Kind::Monoidal:
      return "M " + std::to_string(i + 1) + " " + std::to_string(j + 1);
    case Kind::CoordChange:
      s = "C " + std::to_string(i + 1) + " ";
      for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k > 0) s += ';';
        s += '(' + terms[k].c.to_string() + ',' + std::to_string(terms[k].m);
        if (terms[k].rep && !terms[k].c.is_constant())
          s += ',' + terms[k].rep->to_string();
        s += ')';
      }
      return s;
    case Kind::Permute:
      s = "P";
      for (std::size_t p : perm) s += " " + std::to_string(p + 1);
      return s;
  }
  return s;
}

// -------------------------------------------------------------- pushforward

namespace {

long monoidal_loss(const std::vector<TSeries>& psi, const TransformStep& step) {
  if (step.kind != TransformStep::Kind::Monoidal) return 0;
  const long o = psi[step.i].order_bound();
  return o >= TSeries::kExactPrec ? 0 : std::max<long>(o, 0);
}

// Psi' from Psi for one step; inversions of exact units go to `target` terms.
std::vector<TSeries> push(const std::vector<TSeries>& psi, const TransformStep& step, long target) {
  std::vector<TSeries> out = psi;
  switch (step.kind) {
    case TransformStep::Kind::Monoidal: {
      const Value a = ord(psi[step.i]);
      if (!a.is_exact()) throw ContractError("monoidal divisor has no certified order");
      const TSeries unit = psi[step.i].times_t(-a.amount);
      out[step.j] = psi[step.j].times_t(-a.amount) * invert_unit(unit, std::max<long>(target, 1));
      break;
    }
    case TransformStep::Kind::CoordChange: {
      TSeries acc = psi[step.i];
      for (const auto& t : step.terms) acc = acc - psi[0].pow(t.m).scaled(t.c);
      out[step.i] = acc;
      break;
    }
    case TransformStep::Kind::Permute:
      for (std::size_t k = 0; k < psi.size(); ++k) out[k] = psi[step.perm[k]];
      break;
  }
  return out;
}

ValuationSpec with_step(const ValuationSpec& spec, const TransformStep& step) {
  ValuationSpec out = spec;
  out.psi = push(spec.psi, step, spec.prec);
  if (spec.regen) {
    const auto prev = spec.regen;
    const long loss = monoidal_loss(spec.psi, step);
    out.regen = std::make_shared<const Regenerator>([prev, step, loss](long p) {
      return push((*prev)(p + loss), step, p + loss);
    });
  }
  return out;
}

// Certify the order of entry i, escalating while possible.
ValuationSpec certify_entry(const ValuationSpec& spec, std::size_t i, long cap) {
  ValuationSpec cur = spec;
  while (!ord(cur.psi[i]).is_exact() && cur.can_raise() && cur.prec < cap)
    cur = raise_precision(cur, std::min(cur.prec * 2, cap));
  return cur;
}

}  // namespace

ValuationSpec apply_monoidal(const ValuationSpec& spec, std::size_t i, std::size_t j, long prec_cap) {
  const TransformStep step = TransformStep::monoidal(i, j);
  step.validate(spec.n);
  ValuationSpec cur = certify_entry(certify_entry(spec, i, prec_cap), j, prec_cap);
  const Value a = ord(cur.psi[i]), b = ord(cur.psi[j]);
  if (!a.is_exact() || !b.is_exact())
    throw ContractError("monoidal transformation needs certified values of both variables");
  if (b.amount < a.amount)
    throw ContractError("monoidal transformation needs v(X" + std::to_string(j + 1) + ") >= v(X" +
                        std::to_string(i + 1) + ")");
  return with_step(cur, step);
}

ValuationSpec apply_coord_change(const ValuationSpec& spec, std::size_t i, const std::vector<CoordTerm>& terms,
                                 long prec_cap) {
  const TransformStep step = TransformStep::coord_change(i, terms);
  step.validate(spec.n);
  if (terms.empty()) return spec;
  ValuationSpec cur = spec;
  for (;;) {
    ValuationSpec out = with_step(cur, step);
    if (ord(out.psi[i]).is_exact()) return out;
    if (!cur.can_raise() || cur.prec >= prec_cap)
      throw KernelSuspicionError("Y" + std::to_string(i + 1) +
                                 " is indistinguishable from 0 at precision " +
                                 std::to_string(out.psi[i].prec() >= TSeries::kExactPrec
                                                    ? prec_cap
                                                    : out.psi[i].prec()));
    cur = raise_precision(cur, std::min(cur.prec * 2, prec_cap));
  }
}

ValuationSpec apply_permutation(const ValuationSpec& spec, const std::vector<std::size_t>& perm) {
  const TransformStep step = TransformStep::permute(perm);
  step.validate(spec.n);
  return with_step(spec, step);
}

ValuationSpec apply_step(const ValuationSpec& spec, const TransformStep& step, long prec_cap) {
  switch (step.kind) {
    case TransformStep::Kind::Monoidal: return apply_monoidal(spec, step.i, step.j, prec_cap);
    case TransformStep::Kind::CoordChange: return apply_coord_change(spec, step.i, step.terms, prec_cap);
    case TransformStep::Kind::Permute: return apply_permutation(spec, step.perm);
  }
  return spec;
}

// ----------------------------------------------------------------- pullback

namespace {

KElem term_rep(const CoordTerm& t, std::size_t n) {
  if (t.rep && t.rep->nvars() == n) return *t.rep;
  if (t.c.is_constant()) return KElem::constant(n, t.c.constant_value());
  throw RepresentativeMissingError("coefficient " + t.c.to_string() + " has no K-representative");
}

// Images of the new variables in terms of `old` (the images of the old ones).
std::vector<std::optional<KElem>> step_images(const TransformStep& step,
                                              const std::vector<std::optional<KElem>>& old) {
  const std::size_t n = old.size();
  std::vector<std::optional<KElem>> out = old;
  switch (step.kind) {
    case TransformStep::Kind::Monoidal:
      if (old[step.j] && old[step.i]) out[step.j] = *old[step.j] / *old[step.i];
      else out[step.j].reset();
      break;
    case TransformStep::Kind::CoordChange: {
      if (!old[step.i] || !old[0]) {
        out[step.i].reset();
        break;
      }
      KElem acc = *old[step.i];
      for (const auto& t : step.terms) {
        KElem r;
        try {
          r = term_rep(t, n);
        } catch (const RepresentativeMissingError&) {
          out[step.i].reset();
          return out;
        }
        acc -= r * old[0]->pow(static_cast<int>(t.m));
      }
      out[step.i] = acc;
      break;
    }
    case TransformStep::Kind::Permute:
      for (std::size_t k = 0; k < n; ++k) out[k] = old[step.perm[k]];
      break;
  }
  return out;
}

KElem substitute_all(const KElem& f, const std::vector<std::optional<KElem>>& images) {
  const std::size_t n = images.size();
  std::vector<KElem> im(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool used = f.num().degree_in(k) > 0 || f.den().degree_in(k) > 0;
    if (images[k]) im[k] = *images[k];
    else if (used) throw RepresentativeMissingError("Y" + std::to_string(k + 1) + " has no K-representative");
    else im[k] = KElem::variable(n, k);
  }
  return f.substitute<XVars>(std::span<const KElem>(im));
}

}  // namespace

KElem pullback(const TransformStep& step, const KElem& f) {
  const std::size_t n = f.nvars();
  step.validate(n);
  std::vector<std::optional<KElem>> id(n);
  for (std::size_t k = 0; k < n; ++k) id[k] = KElem::variable(n, k);
  if (step.kind == TransformStep::Kind::CoordChange)
    for (const auto& t : step.terms) (void)term_rep(t, n);  // surface missing representatives
  return substitute_all(f, step_images(step, id));
}

// ---------------------------------------------------------------------- log

ValuationSpec TransformLog::apply(const ValuationSpec& spec, const TransformStep& step, long prec_cap) {
  if (n_ == 0) n_ = spec.n;
  if (spec.n != n_) throw StructuralError("log arity does not match the spec");
  const std::size_t touched = step.kind == TransformStep::Kind::Monoidal ? step.j : step.i;
  const Value before = step.kind == TransformStep::Kind::Permute ? Value::exact(0) : ord(spec.psi[touched]);
  ValuationSpec out = apply_step(spec, step, prec_cap);
  const Value after = step.kind == TransformStep::Kind::Permute ? Value::exact(0) : ord(out.psi[touched]);
  steps_.push_back(step);
  summaries_.push_back({before, after});
  return out;
}

void TransformLog::append(const TransformLog& other) {
  if (n_ == 0) n_ = other.n_;
  if (!other.empty() && other.n_ != n_) throw StructuralError("log arity mismatch");
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
  summaries_.insert(summaries_.end(), other.summaries_.begin(), other.summaries_.end());
}

std::vector<std::optional<KElem>> TransformLog::forward_map() const {
  std::vector<std::optional<KElem>> cur(n_);
  for (std::size_t k = 0; k < n_; ++k) cur[k] = KElem::variable(n_, k);
  for (const auto& step : steps_) cur = step_images(step, cur);
  return cur;
}

KElem TransformLog::pullback(const KElem& f) const {
  if (f.nvars() != n_) throw StructuralError("element arity does not match the log");
  return substitute_all(f, forward_map());
}

std::string TransformLog::serialize() const {
  std::string s;
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    s += steps_[k].to_string();
    if (k < summaries_.size() && steps_[k].kind != TransformStep::Kind::Permute)
      s += "  # " + summaries_[k].before.to_string() + " -> " + summaries_[k].after.to_string();
    s += '\n';
  }
  return s;
}

namespace {

std::size_t parse_index(const std::string& tok, std::size_t n, int line, int col) {
  std::size_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoul(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ParseError("expected a variable index, got '" + tok + "'", line, col);
  }
  if (v < 1 || v > n) throw ParseError("variable index " + tok + " out of range", line, col);
  return v - 1;
}

}  // namespace

TransformLog TransformLog::parse(const std::string& text, std::size_t n, std::size_t s) {
  TransformLog log(n);
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = raw.substr(0, raw.find('#'));
    const auto first = body.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const int col = static_cast<int>(first) + 1;
    const char kind = body[first];
    std::istringstream toks(body.substr(first + 1));
    TransformStep step;
    if (kind == 'M') {
      std::string a, b, extra;
      toks >> a >> b;
      if (b.empty() || (toks >> extra)) throw ParseError("expected 'M i j'", line, col);
      step = TransformStep::monoidal(parse_index(a, n, line, col), parse_index(b, n, line, col));
    } else if (kind == 'P') {
      std::vector<std::size_t> perm;
      std::string tok;
      while (toks >> tok) perm.push_back(parse_index(tok, n, line, col));
      step = TransformStep::permute(std::move(perm));
    } else if (kind == 'C') {
      std::string idx;
      toks >> idx;
      const std::size_t target = parse_index(idx, n, line, col);
      std::string rest;
      std::getline(toks, rest);
      const auto rest_at = body.find(rest.empty() ? std::string("\x01") : rest);
      std::vector<CoordTerm> terms;
      std::size_t pos = 0;
      while (pos < rest.size()) {
        const auto open = rest.find('(', pos);
        if (open == std::string::npos) {
          if (rest.find_first_not_of(" \t\r;", pos) != std::string::npos)
            throw ParseError("expected '(c,m)'", line, static_cast<int>(rest_at + pos) + 1);
          break;
        }
        // the coefficient may itself contain parentheses: match the closing one
        int depth = 0;
        std::size_t close = open;
        for (; close < rest.size(); ++close) {
          if (rest[close] == '(') ++depth;
          else if (rest[close] == ')' && --depth == 0) break;
        }
        if (close >= rest.size()) throw ParseError("unbalanced parentheses", line, static_cast<int>(rest_at + open) + 1);
        const std::string inner = rest.substr(open + 1, close - open - 1);
        std::vector<std::string> parts;
        std::size_t start = 0;
        depth = 0;
        for (std::size_t k = 0; k < inner.size(); ++k) {
          if (inner[k] == '(') ++depth;
          else if (inner[k] == ')') --depth;
          else if (inner[k] == ',' && depth == 0) {
            parts.push_back(inner.substr(start, k - start));
            start = k + 1;
          }
        }
        parts.push_back(inner.substr(start));
        const int pcol = static_cast<int>(rest_at + open) + 2;
        if (parts.size() < 2 || parts.size() > 3) throw ParseError("expected '(c,m)' or '(c,m,rep)'", line, pcol);
        CoordTerm t;
        t.c = text::evaluate<ParamVars>(text::parse(parts[0], line, pcol - 1), s, line);
        const auto m = parse_index(parts[1], 1u << 20, line, pcol);
        t.m = static_cast<unsigned>(m + 1);
        if (parts.size() == 3) t.rep = text::evaluate<XVars>(text::parse(parts[2], line, pcol - 1), n, line);
        terms.push_back(std::move(t));
        pos = close + 1;
      }
      step = TransformStep::coord_change(target, std::move(terms));
    } else {
      throw ParseError(std::string("unknown step kind '") + kind + "'", line, col);
    }
    try {
      step.validate(n);
    } catch (const StructuralError& e) {
      throw ParseError(e.what(), line, col);
    }
    log.steps_.push_back(std::move(step));
    log.summaries_.push_back({Value::exact(0), Value::exact(0)});
  }
  return log;
}

ValuationSpec replay(const ValuationSpec& initial, const TransformLog& log, long prec_cap) {
  ValuationSpec cur = initial;
  for (const auto& step : log.steps()) cur = apply_step(cur, step, prec_cap);
  return cur;
}

}  // namespace dval
