#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/formula.hpp"

namespace teamlog {

/// Index sets are {0..k-1} with k ≤ 16; subsets are bitmasks.
using IndexSet = std::uint32_t;

inline constexpr std::size_t kMaxIndices = 16;

/// An ultrafilter on a finite index set, stored as its full member list.
class Ultrafilter {
 public:
  static Ultrafilter principal(std::size_t index_count, std::size_t generator);

  std::size_t index_count() const noexcept { return index_count_; }
  std::size_t generator() const noexcept { return generator_; }
  IndexSet full() const noexcept { return static_cast<IndexSet>((1U << index_count_) - 1); }
  bool contains(IndexSet set) const;
  /// Members in ascending mask order.
  std::vector<IndexSet> members() const;

  /// Every filter and ultrafilter axiom checked over all subsets, plus
  /// equality with the principal filter at the generator.
  bool satisfies_axioms() const;

 private:
  Ultrafilter(std::size_t index_count, std::size_t generator, std::vector<bool> member);

  std::size_t index_count_ = 0;
  std::size_t generator_ = 0;
  std::vector<bool> member_;
};

/// The principal ultrafilter at the least element of ⋂family (I when the
/// family is empty). An empty intersection has no extension on a finite
/// index set: kNoUltrafilter.
Ultrafilter ultrafilter_from_fip(std::size_t index_count, const std::vector<IndexSet>& family);

/// Π M_i / U with its quotient map. Product elements f are addressed by the
/// mixed-radix code with coordinate 0 most significant.
struct Ultraproduct {
  Structure structure;
  std::vector<std::size_t> radix;
  /// Class id of every product element, indexed by code.
  std::vector<Element> class_of;
  /// Least-code representative of each class.
  std::vector<Tuple> representative;

  std::uint64_t code(const Tuple& f) const;
  Tuple element(std::uint64_t code) const;
  Element class_of_tuple(const Tuple& f) const { return class_of.at(code(f)); }
};

/// Classes of the full product under ≡_U, numbered by least member code.
/// Throws kShape on a signature or index-count mismatch and BudgetExceeded
/// when |Π M_i| exceeds `budget`.
Ultraproduct product_structure(const std::vector<Structure>& family, const Ultrafilter& u,
                               std::size_t budget = 4096);

/// Π X_i / U over the product, by enumerating every Π-assignment with the
/// teams' shared domain. Throws kShape on domain or count mismatch and
/// BudgetExceeded past `budget` Π-assignments.
Team team_ultraproduct(const Ultraproduct& product, const std::vector<Team>& teams,
                       const Ultrafilter& u, std::uint64_t budget = std::uint64_t{1} << 20);

enum class LemmaKind { kUnion, kDisjointness, kConstSupplement, kDuplicate, kSupplement };

std::string to_string(LemmaKind kind);
std::optional<LemmaKind> lemma_kind_from_string(const std::string& text);

/// Inputs for one team-lemma identity. Which fields are read depends on the
/// kind: ys for union and disjointness, var for the supplement kinds,
/// elements for const-supplement, images for supplement (aligned with the
/// rows of each xs[i]).
struct LemmaInput {
  std::vector<Structure> structures;
  std::vector<Team> xs;
  std::vector<Team> ys;
  std::string var;
  Tuple elements;
  std::vector<std::vector<std::vector<Element>>> images;
};

struct LemmaCheck {
  LemmaKind kind = LemmaKind::kUnion;
  bool holds = true;
  /// The operation applied in the product, and the product of the
  /// coordinatewise operation.
  Team lhs;
  Team rhs;
  /// Whether the side clause's premise holds for U-many indices, and its
  /// conclusion when it does.
  bool side_premise = false;
  bool side_holds = true;
  std::string detail;
};

LemmaCheck check_team_lemma(const LemmaInput& input, LemmaKind kind, const Ultrafilter& u);

/// Construct inventory under which satisfaction is transferred in both
/// directions: atoms, literals, ∧, ⋁, ∀, ∀¹, ∃¹, ∼̇, ∼.
bool strong_los_eligible(const FragmentLabel& label);
/// Closure under ultraproducts, built up from atoms: ∧, ⋁, ∨, ∨s, ∃, ∃s, ∀,
/// ∀¹, ∃¹ over eligible parts, and ∼̇, ∼ over strongly eligible parts.
bool weak_los_eligible(const Formula& phi);

struct LosRecord {
  /// {i : M_i ⊨_{X_i} φ}.
  IndexSet satisfied = 0;
  bool lhs = false;
  bool rhs = false;
  bool weak_claimed = false;
  bool strong_claimed = false;
  bool agree() const noexcept { return lhs == rhs; }
};

LosRecord check_los(const std::vector<Structure>& structures, const std::vector<Team>& teams,
                    const Ultrafilter& u, const Formula& phi, const EvalOptions& options = {});

/// Checks that c ↦ representative(c)[j] is an isomorphism from the product
/// onto M_j (for U principal at j) carrying the team product onto X_j.
struct IsomorphismCheck {
  bool bijective = false;
  bool relations = false;
  bool functions = false;
  bool team = true;
  bool holds() const noexcept { return bijective && relations && functions && team; }
};

IsomorphismCheck check_principal_isomorphism(const std::vector<Structure>& structures,
                                             const std::vector<Team>& teams,
                                             const Ultrafilter& u);

}  // namespace teamlog
