#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/term.hpp"

namespace teamlog {

enum class Op {
  kEq,
  kNeq,
  kRel,
  kNegRel,
  kDep,
  kInc,
  kIndep,
  kExcl,
  kAnd,
  kOr,
  kOrStrict,
  kIntOr,
  kImpl,
  kWeakNeg,
  kClassNeg,
  kExists,
  kExistsStrict,
  kForall,
  kExists1,
  kForall1,
};

std::string_view op_name(Op op);

/// Team-logic formula as a value tree.
///
/// Field use per op:
///   kEq, kNeq           terms = {t, u}
///   kRel, kNegRel       symbol, terms = arguments
///   kDep                xs = determinant, ys = {dependent}
///   kInc                xs ⊆ ys
///   kIndep              xs ⊥_zs ys
///   kExcl               xs | ys
///   binary connectives  children = {left, right}
///   negations           children = {body}
///   quantifiers         var, children = {body}
struct Formula {
  Op op = Op::kEq;
  std::vector<Term> terms;
  std::string symbol;
  std::string var;
  std::vector<std::string> xs;
  std::vector<std::string> ys;
  std::vector<std::string> zs;
  std::vector<Formula> children;

  static Formula eq(Term t, Term u);
  static Formula neq(Term t, Term u);
  static Formula rel(std::string symbol, std::vector<Term> args);
  static Formula neg_rel(std::string symbol, std::vector<Term> args);
  static Formula dep(std::vector<std::string> xs, std::string y);
  static Formula inc(std::vector<std::string> xs, std::vector<std::string> ys);
  static Formula indep(std::vector<std::string> xs, std::vector<std::string> ys,
                       std::vector<std::string> zs = {});
  static Formula excl(std::vector<std::string> xs, std::vector<std::string> ys);
  static Formula binary(Op op, Formula left, Formula right);
  static Formula unary(Op op, Formula body);
  static Formula quantifier(Op op, std::string var, Formula body);

  static Formula conj(Formula a, Formula b) { return binary(Op::kAnd, std::move(a), std::move(b)); }
  static Formula lax_or(Formula a, Formula b) { return binary(Op::kOr, std::move(a), std::move(b)); }
  static Formula exists(std::string x, Formula body) {
    return quantifier(Op::kExists, std::move(x), std::move(body));
  }
  static Formula forall(std::string x, Formula body) {
    return quantifier(Op::kForall, std::move(x), std::move(body));
  }

  bool is_literal() const noexcept;
  bool is_atom() const noexcept;  // one of the four dependency atoms
  bool is_binary() const noexcept;
  bool is_negation() const noexcept;
  bool is_quantifier() const noexcept;

  const Formula& left() const { return children.at(0); }
  const Formula& right() const { return children.at(1); }
  const Formula& body() const { return children.at(0); }

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Constructs occurring in a formula; computed, never declared.
struct FragmentLabel {
  bool dep = false;
  bool indep = false;
  bool inc = false;
  bool excl = false;
  bool lax_or = false;
  bool strict_or = false;
  bool lax_exists = false;
  bool strict_exists = false;
  bool forall = false;
  bool int_or = false;
  bool impl = false;
  bool weak_neg = false;
  bool class_neg = false;
  bool exists1 = false;
  bool forall1 = false;

  /// No ⋁, →, ∼̇, ∼, ∃¹, ∀¹.
  bool in_fo_c() const noexcept;
  bool uses_strict() const noexcept { return strict_or || strict_exists; }
  bool has_atoms() const noexcept { return dep || indep || inc || excl; }
  /// Construct names in a fixed order, for reports.
  std::vector<std::string> names() const;

  friend bool operator==(const FragmentLabel&, const FragmentLabel&) = default;
};

FragmentLabel fragment_of(const Formula& phi);

/// Literals under ∧, ∨, ∨s, ∃, ∃s, ∀ only.
bool is_first_order(const Formula& phi);
/// Syntactic sufficient condition for downward closure.
bool is_downward_closed(const Formula& phi);
/// Syntactic sufficient condition for union closure (lax inclusion logic).
bool is_union_closed(const Formula& phi);

std::set<std::string> free_vars(const Formula& phi);
/// Free variables in sorted order.
std::vector<std::string> free_var_list(const Formula& phi);
std::set<std::string> free_vars(const std::vector<Formula>& phis);

/// φ(t/x). Throws kCapture if a variable of t would be bound and kFragment if
/// x occurs free inside a dependency atom.
Formula substitute(const Formula& phi, const Term& t, const std::string& x);

enum class AtomKind { kDep, kInc, kIndep, kExcl };

/// Atom over terms rewritten as ∃u0…∃uk (atom(u0,…,uk) ∧ u0 = t0 ∧ …) with
/// fresh `$u` variables. Term lists that are all variables yield the plain
/// atom. For dep, `right` holds the single dependent term.
Formula desugar_term_atom(AtomKind kind, const std::vector<Term>& left,
                          const std::vector<Term>& right,
                          const std::vector<Term>& condition = {});

/// ∨ ↦ ∨s and ∃ ↦ ∃s throughout.
Formula strictify(const Formula& phi);

/// Symbols used by the formulas with the arity at first use.
Signature infer_signature(const std::vector<Formula>& phis);
/// Throws kSymbol or kArity when a symbol is missing or misused.
void check_signature(const Formula& phi, const Signature& signature);

std::size_t depth(const Formula& phi);
std::size_t node_count(const Formula& phi);

}  // namespace teamlog
