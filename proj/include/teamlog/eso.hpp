#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/formula.hpp"
#include "teamlog/term.hpp"

namespace teamlog {

/// First-order formula with Tarski semantics over a base signature extended
/// by relation variables. Relation-variable atoms take variables only.
struct FoFormula {
  enum class Kind { kTrue, kFalse, kEq, kRel, kRelVar, kNot, kAnd, kOr, kImplies, kIff, kExists, kForall };

  Kind kind = Kind::kTrue;
  /// Relation symbol or relation variable.
  std::string name;
  std::vector<Term> terms;
  std::vector<FoFormula> children;
  /// Bound variable of a quantifier.
  std::string var;

  static FoFormula truth() { return {}; }
  static FoFormula falsity();
  static FoFormula eq(Term a, Term b);
  static FoFormula rel(std::string symbol, std::vector<Term> args);
  static FoFormula rel_var(std::string name, const std::vector<std::string>& args);
  static FoFormula negate(FoFormula a);
  /// n-ary; the empty conjunction is true and the empty disjunction false.
  static FoFormula conj(std::vector<FoFormula> parts);
  static FoFormula disj(std::vector<FoFormula> parts);
  static FoFormula implies(FoFormula a, FoFormula b);
  static FoFormula iff(FoFormula a, FoFormula b);
  static FoFormula exists(std::string var, FoFormula body);
  static FoFormula forall(std::string var, FoFormula body);
  /// Nested quantifiers in list order, outermost first.
  static FoFormula exists(const std::vector<std::string>& vars, FoFormula body);
  static FoFormula forall(const std::vector<std::string>& vars, FoFormula body);

  friend bool operator==(const FoFormula&, const FoFormula&) = default;
};

std::string to_string(const FoFormula& phi);

/// ∃ prefix ⋯ matrix, with the team predicate left free.
struct EsoSentence {
  std::vector<SymbolDecl> prefix;
  FoFormula matrix;
  std::string team_predicate = "R";
  std::vector<std::string> team_vars;
};

/// `ER1/2 ER2/3 matrix`; the team predicate and its arity are not printed.
std::string to_string(const EsoSentence& chi);

/// χ_φ(R) for a lax FO(dep, ⊥_c, ⊆, |) formula whose free variables are
/// among team_vars; R's columns follow team_vars. Quantifiers widen the
/// relation they pass down by one column. Throws kFragment for any other
/// construct and kUnbound for free variables outside team_vars.
EsoSentence translate(const Formula& phi, const std::vector<std::string>& team_vars);

using RelationEnv = std::map<std::string, Relation, std::less<>>;

/// Tarski evaluation of a sentence. Throws kUnbound for a free individual
/// variable or unbound relation variable, kArity on arity mismatches.
bool eval_fo(const Structure& structure, const FoFormula& sentence, const RelationEnv& env);

struct EsoOptions {
  /// n^arity bound per prefix relation variable.
  std::size_t max_cells = 16;
  /// Search nodes before giving up.
  std::uint64_t max_nodes = std::uint64_t{1} << 24;
};

struct EsoStats {
  std::uint64_t nodes = 0;
};

/// Depth-first search over the prefix relations, cell by cell, smallest
/// encodings first, cutting branches whose matrix is already decided under
/// three-valued evaluation. Throws BudgetExceeded past either bound.
bool eval_eso(const Structure& structure, const EsoSentence& chi, const Relation& team_relation,
              const EsoOptions& options = {}, EsoStats* stats = nullptr);

struct Crosscheck {
  bool direct = false;
  bool via_eso = false;
  bool agree() const noexcept { return direct == via_eso; }
};

/// Translates over team_vars (the team's own variables when empty) and
/// compares the evaluator's verdict with the ESO verdict on X[v⃗].
Crosscheck crosscheck(const Structure& structure, const Team& team, const Formula& phi,
                      std::vector<std::string> team_vars = {}, const EsoOptions& options = {});

}  // namespace teamlog
