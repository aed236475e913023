#include "dval/specfile.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <regex>
#include <sstream>

namespace dval {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long parse_long(const std::string& s, const char* what, int line, int col) {
  try {
    std::size_t used = 0;
    const long v = std::stol(trim(s), &used);
    if (used != trim(s).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected an integer for ") + what + ", got '" + trim(s) + "'", line, col);
  }
}

struct Chunk {
  bool negative = false;
  std::string text;
  int column = 0;  // zero-based column of text[0]
};

// Split at top-level + and -; a sign right after '^' belongs to the exponent.
std::vector<Chunk> split_sum(const std::string& s, int base, int line) {
  std::vector<Chunk> out;
  int depth = 0;
  bool negative = false;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    const std::string raw = s.substr(start, end - start);
    const std::string t = trim(raw);
    if (t.empty()) {
      if (end < s.size() || !out.empty() || negative)
        throw ParseError("missing term", line, base + static_cast<int>(end) + 1);
      return;
    }
    out.push_back({negative, t, base + static_cast<int>(start + raw.find(t[0]))});
  };
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char ch = s[k];
    if (ch == '(') ++depth;
    else if (ch == ')') {
      if (--depth < 0) throw ParseError("unbalanced ')'", line, base + static_cast<int>(k) + 1);
    } else if ((ch == '+' || ch == '-') && depth == 0) {
      std::size_t p = k;
      while (p > 0 && (s[p - 1] == ' ' || s[p - 1] == '\t')) --p;
      if (p > 0 && s[p - 1] == '^') continue;
      if (trim(s.substr(start, k - start)).empty() && out.empty()) {
        // leading sign
        if (ch == '-') negative = !negative;
        start = k + 1;
        continue;
      }
      flush(k);
      negative = ch == '-';
      start = k + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced '('", line, base + static_cast<int>(s.size()));
  flush(s.size());
  return out;
}

text::ExprPtr negate(const text::ExprPtr& e) {
  auto n = std::make_shared<text::Expr>();
  n->kind = text::Expr::Kind::Neg;
  n->lhs = e;
  return n;
}

Generator parse_generator(const Chunk& c, int line) {
  Generator g;
  const auto open = c.text.find('(');
  const std::string head = trim(c.text.substr(0, open));
  g.kind = head == "geom" ? Generator::Kind::Geom : Generator::Kind::Exp;
  g.negated = c.negative;
  if (c.text.back() != ')') throw ParseError("generator call must end with ')'", line, c.column + 1);
  const std::string inner = c.text.substr(open + 1, c.text.size() - open - 2);
  std::vector<std::pair<std::string, int>> args;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= inner.size(); ++k) {
    if (k < inner.size() && inner[k] == '(') ++depth;
    else if (k < inner.size() && inner[k] == ')') --depth;
    else if (k == inner.size() || (inner[k] == ',' && depth == 0)) {
      args.push_back({inner.substr(start, k - start), c.column + static_cast<int>(open + 1 + start)});
      start = k + 1;
    }
  }
  if (args.size() != 4)
    throw ParseError(head + " takes 4 arguments (c, r, start, shift)", line, c.column + 1);
  g.c = text::parse(args[0].first, line, args[0].second);
  g.r = text::parse(args[1].first, line, args[1].second);
  g.start = parse_long(args[2].first, "start", line, args[2].second + 1);
  g.shift = parse_long(args[3].first, "shift", line, args[3].second + 1);
  if (g.start < 0) throw ParseError("generator start must be >= 0", line, args[2].second + 1);
  return g;
}

ExplicitTerm parse_term(const Chunk& c, int line) {
  static const std::regex tail(R"(^(.*?)\s*\*?\s*\bt\s*(\^\s*([0-9]+))?$)");
  std::smatch m;
  ExplicitTerm term;
  std::string coeff = c.text;
  if (std::regex_match(c.text, m, tail)) {
    coeff = trim(m[1].str());
    term.degree = m[3].matched ? parse_long(m[3].str(), "degree", line, c.column + 1) : 1;
  }
  term.coeff = coeff.empty() ? text::parse("1", line, c.column) : text::parse(coeff, line, c.column);
  if (c.negative) term.coeff = negate(term.coeff);
  return term;
}

EntrySource parse_entry(const std::string& rhs, int base, int line) {
  EntrySource e;
  e.line = line;
  for (const Chunk& c : split_sum(rhs, base, line)) {
    if (c.text.rfind("geom", 0) == 0 || c.text.rfind("exp", 0) == 0) {
      const auto open = c.text.find('(');
      if (open != std::string::npos && (trim(c.text.substr(0, open)) == "geom" || trim(c.text.substr(0, open)) == "exp")) {
        e.generators.push_back(parse_generator(c, line));
        continue;
      }
    }
    e.terms.push_back(parse_term(c, line));
  }
  return e;
}

bool is_atom(const text::ExprPtr& e) {
  using K = text::Expr::Kind;
  return e->kind == K::Number || e->kind == K::Var || e->kind == K::Pow;
}

std::string print_coeff(const text::ExprPtr& e) {
  const std::string s = text::print(e);
  return is_atom(e) && s.find_first_of("+-/ ") == std::string::npos ? s : "(" + s + ")";
}

std::string print_entry(const EntrySource& e) {
  std::string s;
  for (const auto& t : e.terms) {
    if (!s.empty()) s += " + ";
    const std::string c = print_coeff(t.coeff);
    if (t.degree == 0) s += c;
    else {
      const std::string tp = t.degree == 1 ? "t" : "t^" + std::to_string(t.degree);
      s += c == "1" ? tp : c + "*" + tp;
    }
  }
  for (const auto& g : e.generators) {
    if (!s.empty()) s += g.negated ? " - " : " + ";
    else if (g.negated) s += "-";
    s += g.kind == Generator::Kind::Geom ? "geom(" : "exp(";
    s += text::print(g.c) + ", " + text::print(g.r) + ", " + std::to_string(g.start) + ", " +
         std::to_string(g.shift) + ")";
  }
  return s.empty() ? "0" : s;
}

}  // namespace

RamifyDirective RamifyDirective::parse(const std::string& text_in, int line, int column_offset) {
  static const std::regex form(R"(^\s*T([0-9]+)\s*=\s*S\s*\^\s*([0-9]+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text_in, m, form))
    throw ParseError("expected T<i>=S^<e>, got '" + trim(text_in) + "'", line, column_offset + 1);
  RamifyDirective d;
  const long i = std::stol(m[1].str()), e = std::stol(m[2].str());
  if (i < 1) throw ParseError("parameter index must be >= 1", line, column_offset + 1);
  if (e < 1) throw ParseError("ramification exponent must be >= 1", line, column_offset + 1);
  d.index = static_cast<std::size_t>(i - 1);
  d.factor = static_cast<unsigned>(e);
  return d;
}

std::string RamifyDirective::to_string() const {
  return "T" + std::to_string(index + 1) + "=S^" + std::to_string(factor);
}

SpecSource parse_spec(const std::string& content) {
  SpecSource src;
  std::istringstream in(content);
  std::string raw;
  int line = 0;
  bool have_n = false;
  std::map<std::size_t, EntrySource> entries;
  std::vector<std::pair<RamifyDirective, int>> pending;
  static const std::regex entry_form(R"(^X([0-9]+)\s*=(.*)$)");
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = raw.substr(0, raw.find('#'));
    const std::string t = trim(body);
    if (t.empty()) continue;
    const int col = static_cast<int>(body.find(t[0]));
    std::smatch m;
    if (std::regex_match(t, m, entry_form)) {
      if (!have_n) throw ParseError("'arity' must come before the entries", line, col + 1);
      const long i = std::stol(m[1].str());
      if (i < 1 || static_cast<std::size_t>(i) > src.n)
        throw ParseError("X" + m[1].str() + " exceeds the declared arity", line, col + 1);
      if (entries.count(static_cast<std::size_t>(i - 1)))
        throw ParseError("X" + m[1].str() + " defined twice", line, col + 1);
      const int rhs_col = col + static_cast<int>(m.position(2));
      entries[static_cast<std::size_t>(i - 1)] = parse_entry(m[2].str(), rhs_col, line);
      continue;
    }
    const auto sp = t.find_first_of(" \t");
    const std::string key = t.substr(0, sp);
    const std::string arg = sp == std::string::npos ? "" : trim(t.substr(sp));
    const int arg_col = col + static_cast<int>(sp == std::string::npos ? t.size() : t.find(arg, sp));
    if (key == "name") {
      if (arg.empty()) throw ParseError("missing name", line, arg_col + 1);
      src.name = arg;
    } else if (key == "arity") {
      const long n = parse_long(arg, "arity", line, arg_col + 1);
      if (n < 1 || n > static_cast<long>(kMaxVars)) throw ParseError("arity out of range", line, arg_col + 1);
      src.n = static_cast<std::size_t>(n);
      have_n = true;
    } else if (key == "params") {
      const long s = parse_long(arg, "params", line, arg_col + 1);
      if (s < 0 || s > static_cast<long>(kMaxVars)) throw ParseError("params out of range", line, arg_col + 1);
      src.s = static_cast<std::size_t>(s);
    } else if (key == "prec") {
      src.prec = parse_long(arg, "prec", line, arg_col + 1);
      if (src.prec < 1) throw ParseError("prec must be positive", line, arg_col + 1);
    } else if (key == "ramify") {
      pending.push_back({RamifyDirective::parse(arg, line, arg_col), line});
    } else if (key == "ramified") {
      src.applied.push_back(RamifyDirective::parse(arg, line, arg_col));
    } else {
      throw ParseError("unknown directive '" + key + "'", line, col + 1);
    }
  }
  if (!have_n) throw ParseError("missing 'arity'", line, 1);
  for (std::size_t i = 0; i < src.n; ++i) {
    auto it = entries.find(i);
    if (it == entries.end()) throw ParseError("X" + std::to_string(i + 1) + " is not defined", line, 1);
    src.entries.push_back(it->second);
  }
  for (const auto& [d, l] : pending) {
    if (d.index >= src.s) throw ParseError("ramify names T" + std::to_string(d.index + 1) + " beyond params", l, 1);
    src = ramify(src, d);
  }
  return src;
}

SpecSource load_spec_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spec(ss.str());
}

SpecSource ramify(const SpecSource& src, const RamifyDirective& d) {
  if (d.factor < 1) throw ContractError("ramification exponent must be >= 1");
  SpecSource out = src;
  bool seen = false;
  for (auto& e : out.entries) {
    for (auto& t : e.terms) {
      seen = seen || text::mentions(t.coeff, 'T', d.index);
      t.coeff = text::ramify(t.coeff, d.index, d.factor);
    }
    for (auto& g : e.generators) {
      seen = seen || text::mentions(g.c, 'T', d.index) || text::mentions(g.r, 'T', d.index);
      g.c = text::ramify(g.c, d.index, d.factor);
      g.r = text::ramify(g.r, d.index, d.factor);
    }
  }
  if (!seen) out.warnings.push_back("ramify " + d.to_string() + ": T" + std::to_string(d.index + 1) +
                                    " does not occur, nothing substituted");
  else if (d.factor > 1) out.applied.push_back(d);
  return out;
}

std::string serialize(const SpecSource& src) {
  std::string s = "name " + src.name + "\narity " + std::to_string(src.n) + "\nparams " + std::to_string(src.s) +
                  "\nprec " + std::to_string(src.prec) + "\n";
  for (const auto& d : src.applied) s += "ramified " + d.to_string() + "\n";
  for (std::size_t i = 0; i < src.entries.size(); ++i)
    s += "X" + std::to_string(i + 1) + " = " + print_entry(src.entries[i]) + "\n";
  return s;
}

namespace {

struct CompiledGenerator {
  Generator::Kind kind;
  RatFunc c, r;
  long start, shift;
};

struct CompiledEntry {
  TSeries finite;
  std::vector<CompiledGenerator> gens;
};

std::vector<TSeries> emit(const std::vector<CompiledEntry>& entries, std::size_t s, long p) {
  std::vector<TSeries> out;
  for (const auto& e : entries) {
    if (e.gens.empty()) {
      out.push_back(e.finite);
      continue;
    }
    TSeries acc = e.finite.truncated(p);
    for (const auto& g : e.gens) {
      std::map<long, RatFunc> terms;
      RatFunc rj = g.r.pow(static_cast<int>(g.start));
      Rat fact = 1;
      for (long j = 1; j <= g.start; ++j) fact *= j;
      for (long j = g.start; j + g.shift < p; ++j) {
        if (j > g.start) {
          rj *= g.r;
          fact *= j;
        }
        RatFunc c = g.c * rj;
        if (g.kind == Generator::Kind::Exp) c = c.scaled(1 / fact);
        if (!c.is_zero()) terms.emplace(j + g.shift, c);
      }
      acc = acc + TSeries::from_terms(s, terms, p);
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace

ValuationSpec to_spec(const SpecSource& src, long prec) {
  const long p = prec > 0 ? prec : src.prec;
  std::vector<CompiledEntry> compiled;
  for (const auto& e : src.entries) {
    CompiledEntry c{TSeries(src.s, TSeries::kExactPrec), {}};
    std::map<long, RatFunc> terms;
    for (const auto& t : e.terms) {
      const RatFunc v = text::evaluate<ParamVars>(t.coeff, src.s, e.line);
      auto [it, fresh] = terms.emplace(t.degree, v);
      if (!fresh) it->second += v;
    }
    std::erase_if(terms, [](const auto& kv) { return kv.second.is_zero(); });
    c.finite = TSeries::from_terms(src.s, terms, TSeries::kExactPrec);
    for (const auto& g : e.generators) {
      RatFunc cc = text::evaluate<ParamVars>(g.c, src.s, e.line);
      if (g.negated) cc = -cc;
      c.gens.push_back({g.kind, cc, text::evaluate<ParamVars>(g.r, src.s, e.line), g.start, g.shift});
      if (g.start + g.shift < 0) throw ParseError("generator would emit a negative t-degree", e.line, 1);
    }
    compiled.push_back(std::move(c));
  }
  ValuationSpec spec;
  spec.name = src.name;
  spec.n = src.n;
  spec.s = src.s;
  spec.prec = p;
  spec.psi = emit(compiled, src.s, p);
  const bool finite = std::all_of(src.entries.begin(), src.entries.end(), [](const auto& e) { return e.is_finite(); });
  if (!finite) {
    const std::size_t s = src.s;
    spec.regen = std::make_shared<const Regenerator>([compiled, s](long q) { return emit(compiled, s, q); });
  }
  for (std::size_t i = 0; i < spec.n; ++i) {
    Value o = ord(spec.psi[i]);
    if (!o.is_exact() && spec.can_raise()) o = ord(raise_precision(spec, std::max(2 * p, kDefaultPrecCap)).psi[i]);
    if (!o.is_exact() || o.amount < 1)
      throw ParseError("X" + std::to_string(i + 1) + ": center condition violated, Psi(X" + std::to_string(i + 1) +
                           ") must have order >= 1 so that the center is the maximal ideal",
                       src.entries[i].line, 1);
  }
  return spec;
}

}  // namespace dval
