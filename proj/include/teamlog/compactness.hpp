#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/corpus.hpp"
#include "teamlog/eso.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/formula.hpp"

namespace teamlog {

/// Bit i stands for the enumerated variable x_i.
using IndexMask = std::uint32_t;

inline constexpr std::size_t kMaxKappa = 12;

/// A finite Γ with an enumeration x_0..x_{κ-1} of variables.
struct GammaSpec {
  std::vector<Formula> formulas;
  std::vector<std::string> variables;

  /// Validates the enumeration (distinct names, covers ⋃Fv, κ ≤ kMaxKappa).
  /// An empty enumeration defaults to ⋃Fv in lexicographic order.
  static GammaSpec make(std::vector<Formula> formulas, std::vector<std::string> variables = {});

  std::size_t kappa() const noexcept { return variables.size(); }
  /// I_φ for the k-th formula.
  IndexMask index_set(std::size_t k) const;
  /// Every subset of {0..κ-1} in (popcount, value) order; ∅ first.
  std::vector<IndexMask> family() const;
  /// The variables of I in increasing index order.
  std::vector<std::string> vars_of(IndexMask index) const;
};

/// Symbol names in τ_Γ: R_k for the k-th formula, S[i,j,..] for S_I.
std::string r_name(std::size_t k);
std::string s_name(IndexMask index);
std::string index_set_string(IndexMask index);

struct DeltaGamma {
  Signature signature;
  std::vector<FoFormula> sentences;
  /// 1, 2 or 3 per sentence.
  std::vector<int> schema;
};

/// τ_Γ extends `base`; throws kSymbol when a generated name is already used.
DeltaGamma build_delta_gamma(const GammaSpec& gamma, const Signature& base);

/// 2|Γ| + 3^κ.
std::size_t expected_sentence_count(const GammaSpec& gamma);

struct IntuitionRecord {
  bool models_delta = false;
  bool cond1 = false;
  bool cond2 = false;
  bool cond3 = false;

  bool conditions() const noexcept { return cond1 && cond2 && cond3; }
  bool consistent() const noexcept { return models_delta == conditions(); }
  bool all() const noexcept { return models_delta && conditions(); }
};

/// models_delta by evaluating every sentence of Δ_Γ; the three conditions
/// from the relation tables directly. Throws kSymbol or kArity when the
/// structure does not interpret τ_Γ.
IntuitionRecord check_intuition(const Structure& structure, const GammaSpec& gamma);

struct ExpansionOptions {
  EvalOptions eval;
  /// Cross-check each φ through its ESO translation.
  bool crosscheck = true;
  EsoOptions eso;
};

struct Expansion {
  Structure structure;
  IntuitionRecord intuition;
  /// One entry per formula; empty when φ lies outside the translatable fragment.
  std::vector<std::optional<Crosscheck>> crosschecks;

  bool verified() const;
};

/// R_φ := Y[Fv(φ)] and S_I := Y[x_I]. Throws kPrecondition naming the first φ
/// that Y does not satisfy, and for an empty Y or a domain missing some x_i.
Expansion expand_model(const Structure& structure, const Team& team, const GammaSpec& gamma,
                       const ExpansionOptions& options = {});

/// One flipped entry of one R or S table.
struct Mutation {
  std::string symbol;
  Tuple tuple;
};

/// A flip that falsifies Δ_Γ in any structure where it holds: entries of R_φ
/// (bound to S_{I_φ}), of S_I for I ≠ {0..κ-1} (bound to S_κ by projection),
/// and of S_κ when some I_φ is all of κ. Throws kPrecondition when none exist.
Mutation random_breaking_mutation(const Structure& expanded, const GammaSpec& gamma, Rng& rng);
Structure apply_mutation(const Structure& structure, const Mutation& mutation);

struct CoherenceSystem {
  std::vector<std::string> variables;
  std::size_t domain_size = 0;
  std::map<IndexMask, Relation> family;
};

/// The S_I tables of a τ_Γ-structure over the whole generated family.
CoherenceSystem coherence_system(const Structure& expanded, const GammaSpec& gamma);

struct MergeResult {
  /// All κ-tuples whose projection onto every I of the family lies in Y_I.
  Team candidate;
  /// The candidate, when it restricts to every Y_I.
  std::optional<Team> team;
  bool verified = false;
  /// Least I in (popcount, value) order where the restriction differs.
  std::optional<IndexMask> failure;
};

/// Throws kShape on a family/enumeration mismatch, BudgetExceeded when
/// n^κ · |family| passes 2^26.
MergeResult merge_teams(const CoherenceSystem& system);

}  // namespace teamlog
