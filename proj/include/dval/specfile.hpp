#pragma once

#include <string>
#include <vector>

#include "dval/textform.hpp"
#include "dval/valuation.hpp"

namespace dval {

/// Substitution T<index+1> -> S^factor; S keeps the slot of T.
struct RamifyDirective {
  std::size_t index = 0;
  unsigned factor = 1;

  static RamifyDirective parse(const std::string& text, int line = 1, int column_offset = 0);
  std::string to_string() const;
};

/// coeff * t^degree
struct ExplicitTerm {
  text::ExprPtr coeff;
  long degree = 0;
};

/// geom: sum_{j>=start} c r^j t^(j+shift); exp: the same with c r^j / j!.
struct Generator {
  enum class Kind { Geom, Exp };
  Kind kind = Kind::Geom;
  bool negated = false;
  text::ExprPtr c, r;
  long start = 1;
  long shift = 0;
};

struct EntrySource {
  std::vector<ExplicitTerm> terms;
  std::vector<Generator> generators;
  int line = 0;

  bool is_finite() const noexcept { return generators.empty(); }
};

/// File form of a valuation spec.
///
///   # comment
///   name ex41
///   arity 2
///   params 1
///   prec 32
///   ramify T4=S^4      (ramified T4=S^4 records one already applied)
///   X1 = t
///   X2 = t + t^3 + geom(1, T1, 1, 3)
///
/// Entries are sums of `coeff*t^d` terms and generator calls. Explicit terms
/// alone give an exact polynomial; generators emit as many terms as asked.
struct SpecSource {
  std::string name = "spec";
  std::size_t n = 0;
  std::size_t s = 0;
  long prec = 32;
  std::vector<RamifyDirective> applied;  // already substituted
  std::vector<EntrySource> entries;
  std::vector<std::string> warnings;
};

SpecSource parse_spec(const std::string& text);
SpecSource load_spec_file(const std::string& path);
/// Substitute the directive into every coefficient expression.
SpecSource ramify(const SpecSource& src, const RamifyDirective& d);
std::string serialize(const SpecSource& src);

/// Build the spec at `prec` (the source's own when <= 0); generator entries
/// stay raisable. Center violations become ParseError on the entry's line.
ValuationSpec to_spec(const SpecSource& src, long prec = 0);

}  // namespace dval
