#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/formula.hpp"

namespace teamlog {

using Rng = std::mt19937_64;

/// Uniform value in [0, bound); bound must be positive.
std::uint64_t pick(Rng& rng, std::uint64_t bound);

/// Shape of randomly generated formulas.
struct FormulaGen {
  std::vector<std::string> free_vars = {"x", "y"};
  /// Names available to quantifiers; a quantified name may shadow.
  std::vector<std::string> bound_vars = {"z", "w"};
  std::vector<SymbolDecl> relations = {{"P", 1}, {"Q", 1}};
  /// Function symbols usable in literal terms; atoms take variables only.
  std::vector<SymbolDecl> functions;
  /// Leaf and inner constructs that may appear.
  std::vector<Op> ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kNegRel, Op::kAnd,
                         Op::kOr, Op::kExists, Op::kForall};
  /// Bound on depth(), where a leaf has depth 1.
  std::size_t max_depth = 4;
  /// Largest variable tuple in dependency atoms.
  std::size_t max_atom_width = 2;
};

Formula random_formula(Rng& rng, const FormulaGen& gen);
Structure random_structure(Rng& rng, const Signature& signature, std::size_t n);
/// Distinct rows drawn uniformly; min(max_rows, n^|vars|) at most.
Team random_team(Rng& rng, const std::vector<std::string>& vars, std::size_t n,
                 std::size_t max_rows);

/// {P/1, Q/1}, the signature of every fixed corpus.
Signature corpus_signature();

/// Fixed formula collections over corpus_signature() with free variables
/// among x, y.
std::vector<Formula> fo_corpus();            // 50 first-order, depth ≤ 4
std::vector<Formula> downward_corpus();      // 30 in FO(dep, |)
std::vector<Formula> union_corpus();         // 30 in FO(⊆)
std::vector<Formula> locality_corpus();      // 30 lax, at most one free variable
std::vector<Formula> strict_locality_corpus();
/// FO(dep, ⊥_c, ⊆, |) with lax operators: all of the above but the strict set,
/// plus independence formulas. Duplicates removed, order kept.
std::vector<Formula> atom_corpus();

}  // namespace teamlog
