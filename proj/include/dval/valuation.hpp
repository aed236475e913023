#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dval/poly.hpp"
#include "dval/tseries.hpp"

namespace dval {

/// Produces the n images Psi(X_i) with every entry known to at least the
/// requested precision. Throws PrecisionCeilingError when it cannot.
using Regenerator = std::function<std::vector<TSeries>(long)>;

/// Parametric valuation v = nu_t o Psi on K_n.
struct ValuationSpec {
  std::string name;
  std::size_t n = 0;
  std::size_t s = 0;
  /// Working precision: the number of t-terms a fresh query relies on.
  long prec = 32;
  std::vector<TSeries> psi;
  /// Source of more terms; empty for specs built from finite data only.
  std::shared_ptr<const Regenerator> regen;

  /// Smallest precision among the entries.
  long effective_prec() const;
  bool can_raise() const noexcept { return regen != nullptr; }
};

struct ResidueDatum {
  Value value;
  std::optional<RatFunc> residue;
};

inline constexpr long kDefaultPrecCap = 512;

/// Optional sink for escalation messages.
using EscalationLog = std::function<void(const std::string&)>;

/// Throws ContractError unless every entry has exact order >= 1.
void check_center(const ValuationSpec& spec);

TSeries eval_poly(const ValuationSpec& spec, const XPoly& p);
TSeries eval_psi(const ValuationSpec& spec, const KElem& f);

Value value(const ValuationSpec& spec, const KElem& f, long prec_cap = kDefaultPrecCap,
            const EscalationLog& log = {});
RatFunc residue(const ValuationSpec& spec, const KElem& f, long prec_cap = kDefaultPrecCap);
ResidueDatum initial_datum(const ValuationSpec& spec, const KElem& f, long prec_cap = kDefaultPrecCap);

/// Value of the entry Psi(X_i) (zero-based), escalating like value().
Value entry_value(const ValuationSpec& spec, std::size_t i, long prec_cap = kDefaultPrecCap);

ValuationSpec raise_precision(const ValuationSpec& spec, long new_prec);
/// Raise until every entry has at least `target` known terms (no-op when it
/// already does); throws PrecisionCeilingError without a source.
ValuationSpec ensure_precision(const ValuationSpec& spec, long target);

/// Canonical multi-line description of the entries.
std::string describe(const ValuationSpec& spec);

}  // namespace dval
