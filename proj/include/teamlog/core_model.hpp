#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teamlog/term.hpp"

namespace teamlog {

/// Domain elements are dense indices 0..n-1.
using Element = std::uint32_t;
using Tuple = std::vector<Element>;

struct SymbolDecl {
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const SymbolDecl&, const SymbolDecl&) = default;
};

/// Relation and function symbols with arities. Constants are 0-ary functions.
/// Symbol names are unique across both lists.
class Signature {
 public:
  Signature() = default;
  Signature(std::vector<SymbolDecl> relations, std::vector<SymbolDecl> functions);

  const std::vector<SymbolDecl>& relations() const noexcept { return relations_; }
  const std::vector<SymbolDecl>& functions() const noexcept { return functions_; }

  std::optional<std::size_t> relation_index(std::string_view name) const;
  std::optional<std::size_t> function_index(std::string_view name) const;
  bool has_symbol(std::string_view name) const;

  /// A copy extended by further relation symbols.
  Signature with_relations(const std::vector<SymbolDecl>& extra) const;

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.relations_ == b.relations_ && a.functions_ == b.functions_;
  }

 private:
  std::vector<SymbolDecl> relations_;
  std::vector<SymbolDecl> functions_;
  std::map<std::string, std::size_t, std::less<>> relation_lookup_;
  std::map<std::string, std::size_t, std::less<>> function_lookup_;
};

/// A finite set of equal-length tuples, kept sorted and duplicate-free.
class Relation {
 public:
  explicit Relation(std::size_t arity = 0, std::vector<Tuple> tuples = {});

  std::size_t arity() const noexcept { return arity_; }
  const std::vector<Tuple>& tuples() const noexcept { return tuples_; }
  std::size_t size() const noexcept { return tuples_.size(); }
  bool empty() const noexcept { return tuples_.empty(); }
  bool contains(const Tuple& t) const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t arity_;
  std::vector<Tuple> tuples_;
};

/// Finite structure over {0..n-1}. Relation tables are dense bitmaps indexed
/// by the big-endian base-n encoding of the argument tuple; function tables
/// are total by construction (every entry starts at element 0).
class Structure {
 public:
  Structure(Signature signature, std::size_t domain_size);

  const Signature& signature() const noexcept { return signature_; }
  std::size_t size() const noexcept { return size_; }

  bool holds(std::size_t relation, std::span<const Element> args) const;
  Element apply(std::size_t function, std::span<const Element> args) const;

  void set_relation(std::size_t relation, std::span<const Element> args, bool value);
  void set_function(std::size_t function, std::span<const Element> args, Element value);

  /// Raw tables, indexed by tuple_index().
  const std::vector<std::uint8_t>& relation_table(std::size_t relation) const {
    return relation_tables_.at(relation);
  }
  const std::vector<Element>& function_table(std::size_t function) const {
    return function_tables_.at(function);
  }
  std::vector<std::uint8_t>& mutable_relation_table(std::size_t relation) {
    return relation_tables_.at(relation);
  }
  std::vector<Element>& mutable_function_table(std::size_t function) {
    return function_tables_.at(function);
  }

  Relation relation(std::size_t relation) const;
  Relation relation(std::string_view name) const;

  std::size_t tuple_index(std::span<const Element> args) const;
  Tuple tuple_at(std::size_t index, std::size_t arity) const;
  /// n^arity, with an error when the table would be unreasonably large.
  std::size_t table_size(std::size_t arity) const;

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  Signature signature_;
  std::size_t size_;
  std::vector<std::vector<std::uint8_t>> relation_tables_;
  std::vector<std::vector<Element>> function_tables_;
};

/// A total map from an ordered list of distinct variables to elements.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::vector<std::string> vars, Tuple values);

  const std::vector<std::string>& vars() const noexcept { return vars_; }
  const Tuple& values() const noexcept { return values_; }
  std::optional<Element> lookup(std::string_view var) const;

 private:
  std::vector<std::string> vars_;
  Tuple values_;
};

/// A set of assignments over a common variable domain. Variables are kept in
/// lexicographic order and rows sorted without duplicates, so equal teams
/// compare equal member-wise. With an empty domain the two possible teams are
/// the empty team and the unit team {∅}.
class Team {
 public:
  Team() = default;
  Team(std::vector<std::string> vars, std::vector<Tuple> rows);

  static Team unit() { return Team({}, {Tuple{}}); }

  const std::vector<std::string>& vars() const noexcept { return vars_; }
  const std::vector<Tuple>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  bool contains(const Tuple& row) const;
  std::optional<std::size_t> column(std::string_view var) const;
  Assignment assignment(std::size_t row) const;

  /// Checks every value against a domain of size n.
  void validate(std::size_t domain_size) const;

  friend bool operator==(const Team&, const Team&) = default;

 private:
  std::vector<std::string> vars_;
  std::vector<Tuple> rows_;
};

/// F: X -> P+(M), one nonempty image per row of the base team (aligned with
/// base.rows()).
class SupplementFunction {
 public:
  SupplementFunction(Team base, std::vector<std::vector<Element>> images,
                     std::size_t domain_size);

  const Team& base() const noexcept { return base_; }
  const std::vector<std::vector<Element>>& images() const noexcept { return images_; }
  const std::vector<Element>& image(std::size_t row) const { return images_.at(row); }

 private:
  Team base_;
  std::vector<std::vector<Element>> images_;
};

Element term_eval(const Structure& structure, const Assignment& assignment,
                  const Term& term);

Team restrict(const Team& team, const std::set<std::string>& vars);
Relation project(const Team& team, const std::vector<std::string>& vars);
Team duplicate(const Team& team, const std::string& var, const Structure& structure);
Team supplement(const Team& team, const std::string& var, const SupplementFunction& f);
Team supplement_const(const Team& team, const std::string& var, Element value,
                      const Structure& structure);

Team team_union(const Team& a, const Team& b);
Team team_intersection(const Team& a, const Team& b);

/// The team of all n^|vars| assignments.
Team full_team(const std::vector<std::string>& vars, std::size_t domain_size);

/// The subteam selecting rows whose bit is set in `mask` (row i <-> bit i).
Team subteam(const Team& team, std::uint64_t mask);

std::string to_string(const Team& team);

/// All masks over m bits ordered by (popcount, value); the empty mask first.
std::vector<std::uint64_t> canonical_subset_order(std::size_t m);

/// Number of labeled structures of size n over the signature.
std::uint64_t structure_count(const Signature& signature, std::size_t n);
/// The structure with the given index in the enumeration order: relation
/// bits in table order, then function values, the last entry varying fastest.
Structure structure_at(const Signature& signature, std::size_t n, std::uint64_t index);

}  // namespace teamlog
