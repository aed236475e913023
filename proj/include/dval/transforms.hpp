#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dval/poly.hpp"
#include "dval/valuation.hpp"

namespace dval {

/// One summand c * X_1^m of a coordinate change. `rep` is a K-element whose
/// Psi-image is the constant c; when present pullback can substitute it.
struct CoordTerm {
  RatFunc c;
  unsigned m = 1;
  std::optional<KElem> rep;
};

/// Indices are zero-based in memory and one-based in text.
struct TransformStep {
  enum class Kind { Monoidal, CoordChange, Permute };
  Kind kind = Kind::Monoidal;
  std::size_t i = 0;  // divisor (Monoidal) or target (CoordChange)
  std::size_t j = 0;  // transformed variable (Monoidal)
  std::vector<CoordTerm> terms;
  std::vector<std::size_t> perm;  // new Y_k = old X_{perm[k]}

  static TransformStep monoidal(std::size_t i, std::size_t j);
  static TransformStep coord_change(std::size_t i, std::vector<CoordTerm> terms);
  static TransformStep permute(std::vector<std::size_t> perm);
  static TransformStep swap(std::size_t n, std::size_t a, std::size_t b);

  /// Text form: `M i j`, `C i (c,m);(c,m)...`, `P p1 .. pn`.
  std::string to_string() const;
  /// Throws StructuralError when the invariants of the variant fail.
  void validate(std::size_t n) const;
};

ValuationSpec apply_monoidal(const ValuationSpec& spec, std::size_t i, std::size_t j,
                             long prec_cap = kDefaultPrecCap);
ValuationSpec apply_coord_change(const ValuationSpec& spec, std::size_t i, const std::vector<CoordTerm>& terms,
                                 long prec_cap = kDefaultPrecCap);
ValuationSpec apply_permutation(const ValuationSpec& spec, const std::vector<std::size_t>& perm);
ValuationSpec apply_step(const ValuationSpec& spec, const TransformStep& step, long prec_cap = kDefaultPrecCap);

/// f over the new variables rewritten over the old variables of the step.
/// Representatives are read as elements of the old variables.
KElem pullback(const TransformStep& step, const KElem& f);

class TransformLog {
 public:
  struct Summary {
    Value before;
    Value after;
  };

  TransformLog() = default;
  explicit TransformLog(std::size_t n) : n_(n) {}

  std::size_t arity() const noexcept { return n_; }
  const std::vector<TransformStep>& steps() const noexcept { return steps_; }
  const std::vector<Summary>& summaries() const noexcept { return summaries_; }
  bool empty() const noexcept { return steps_.empty(); }

  /// Apply `step` to spec, record it and return the new spec.
  ValuationSpec apply(const ValuationSpec& spec, const TransformStep& step, long prec_cap = kDefaultPrecCap);
  void append(const TransformLog& other);

  /// Current variables as elements of the original K_n; nullopt entries
  /// lack a representative somewhere along the way.
  std::vector<std::optional<KElem>> forward_map() const;
  /// f over the final variables rewritten over the original ones.
  KElem pullback(const KElem& f) const;

  std::string serialize() const;
  static TransformLog parse(const std::string& text, std::size_t n, std::size_t s);

 private:
  std::size_t n_ = 0;
  std::vector<TransformStep> steps_;
  std::vector<Summary> summaries_;
};

ValuationSpec replay(const ValuationSpec& initial, const TransformLog& log, long prec_cap = kDefaultPrecCap);

}  // namespace dval
