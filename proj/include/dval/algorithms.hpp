#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dval/kfield.hpp"
#include "dval/transforms.hpp"
#include "dval/valuation.hpp"

namespace dval {

struct GcdResult {
  ValuationSpec spec;
  TransformLog log;
  long common = 0;  // the shared value of all entries afterwards
};

/// Euclid on the entry values by monoidal transformations.
GcdResult gcd_normalize(const ValuationSpec& spec, long prec_cap = kDefaultPrecCap);

struct UniformizerResult {
  enum class Status { Found, GcdPlateau, IterationCap };
  ValuationSpec spec_after;
  TransformLog log;
  Status status = Status::IterationCap;
  std::size_t index = 0;  // Found: entry of value 1
  long plateau = 0;       // GcdPlateau: the common value
  std::size_t sweeps = 0;
  std::vector<long> min_history;  // minimum entry value per sweep

  std::string status_string() const;
};

UniformizerResult find_uniformizer(const ValuationSpec& spec, std::size_t max_iters = 64,
                                   long prec_cap = kDefaultPrecCap);

/// Rank of the Jacobian d(gens)/d(T) over Delta, computed exactly.
std::size_t jacobian_rank(std::span<const RatFunc> gens);

/// Is r algebraic over Q(gens)? Exact; random points only screen for the
/// transcendental case.
bool is_algebraic_over(std::span<const RatFunc> gens, const RatFunc& r, unsigned trials = 3,
                       std::uint64_t seed = 0x5eed);

struct FirstTranscendental {
  ValuationSpec spec;
  TransformLog log;
  RatFunc residue;                       // of Y2/Y1, transcendental over Q
  std::vector<RatFunc> base_algebraics;  // constants subtracted on the way
  std::vector<std::pair<RatFunc, long>> prelim;
};

/// Expects a spec whose entries share the value of Y1. Throws
/// InconclusiveError when every chain runs out.
FirstTranscendental first_transcendental_residue(const ValuationSpec& spec, std::size_t max_steps = 64,
                                                 long prec_cap = kDefaultPrecCap);

struct GeneratorEntry {
  enum class Kind { Transcendental, AlgebraicTower, Unclassified };
  Kind kind = Kind::Unclassified;
  std::size_t index = 0;  // variable Y_{index+1} of the final spec
  // Transcendental
  std::vector<std::pair<RatFunc, long>> prelim;
  RatFunc u;
  std::optional<KElem> representative;
  // AlgebraicTower
  std::vector<RatFunc> members;
  bool truncated = false;
  /// Every chain coefficient u_{k,j} with its Y1 exponent (towers only).
  std::vector<std::pair<RatFunc, long>> chain;
};

struct ResidueFieldReport {
  ValuationSpec original;
  ValuationSpec spec_after;
  TransformLog log;
  UniformizerResult::Status uniformizer = UniformizerResult::Status::Found;
  std::vector<RatFunc> base_algebraics;
  std::vector<GeneratorEntry> generators;  // one per variable Y2..Yn
  std::size_t m = 1;
  std::size_t dimension = 0;
  std::size_t restarts = 0;
  bool inconclusive = false;
  std::string note;
};

struct ResidueFieldOptions {
  std::size_t tower_depth = 8;
  std::size_t chain_cap = 64;
  std::size_t max_iters = 64;
  long prec_cap = kDefaultPrecCap;
};

ResidueFieldReport build_residue_field(const ValuationSpec& spec, const ResidueFieldOptions& opts = {});

/// W_k = Y_k - sum_j u_{k,j} Y1^j for every tower variable.
std::vector<TruncatedXSeries> implicit_ideal(const ResidueFieldReport& report);

struct OrderCheck {
  bool pass = true;
  std::optional<XPoly> witness;  // primitive, positive leading coefficient
  unsigned degree = 0;
  Value witness_value;
  std::size_t samples = 0;
};

/// Checks v(f_r) = r on sampled forms of degree 1..max_degree, then searches
/// the initial coefficients exactly for a linear dependency per degree.
OrderCheck check_order_function(const ValuationSpec& spec, unsigned max_degree = 5, std::size_t samples = 20,
                                std::uint64_t seed = 1, long prec_cap = kDefaultPrecCap);

struct ExtensionReport {
  int case_number = 1;
  OrderCheck order;              // case 1: whole spec; case 2: the Y1..Ym part
  std::size_t rank = 1;
  std::vector<std::pair<std::string, std::vector<long>>> table;
  std::vector<TruncatedXSeries> implicit;
  std::size_t samples = 0;
  std::size_t mismatches = 0;
  std::size_t skipped = 0;       // samples whose value did not certify
  std::vector<std::string> mismatch_examples;
};

ExtensionReport extend_to_order_function(const ResidueFieldReport& report, std::size_t samples = 50,
                                         std::uint64_t seed = 1, unsigned max_degree = 5,
                                         std::size_t samples_per_degree = 20);

}  // namespace dval
