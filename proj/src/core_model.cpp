#include "teamlog/core_model.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "teamlog/errors.hpp"

namespace teamlog {

namespace {

constexpr std::size_t kMaxTableSize = std::size_t{1} << 24;

void sort_unique(std::vector<Tuple>& rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

// Rows of `team` with `var` set to a placeholder, plus the column of `var`.
// The variable is appended when it is not yet in the domain.
struct Extended {
  std::vector<std::string> vars;
  std::size_t column;
  std::vector<Tuple> rows;
};

Extended extend(const Team& team, const std::string& var) {
  Extended out{team.vars(), 0, team.rows()};
  if (auto col = team.column(var)) {
    out.column = *col;
  } else {
    out.vars.push_back(var);
    out.column = out.vars.size() - 1;
    for (auto& row : out.rows) row.push_back(0);
  }
  return out;
}

}  // namespace

Signature::Signature(std::vector<SymbolDecl> relations, std::vector<SymbolDecl> functions)
    : relations_(std::move(relations)), functions_(std::move(functions)) {
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (!relation_lookup_.emplace(relations_[i].name, i).second) {
      throw Error(ErrorKind::kValidation, "duplicate symbol '" + relations_[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (relation_lookup_.count(functions_[i].name) != 0 ||
        !function_lookup_.emplace(functions_[i].name, i).second) {
      throw Error(ErrorKind::kValidation, "duplicate symbol '" + functions_[i].name + "'");
    }
  }
}

std::optional<std::size_t> Signature::relation_index(std::string_view name) const {
  auto it = relation_lookup_.find(name);
  if (it == relation_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Signature::function_index(std::string_view name) const {
  auto it = function_lookup_.find(name);
  if (it == function_lookup_.end()) return std::nullopt;
  return it->second;
}

bool Signature::has_symbol(std::string_view name) const {
  return relation_lookup_.count(name) != 0 || function_lookup_.count(name) != 0;
}

Signature Signature::with_relations(const std::vector<SymbolDecl>& extra) const {
  auto relations = relations_;
  relations.insert(relations.end(), extra.begin(), extra.end());
  return Signature(std::move(relations), functions_);
}

Relation::Relation(std::size_t arity, std::vector<Tuple> tuples)
    : arity_(arity), tuples_(std::move(tuples)) {
  for (const auto& t : tuples_) {
    if (t.size() != arity_) {
      throw Error(ErrorKind::kArity, "relation tuple of length " + std::to_string(t.size()) +
                                         " in a relation of arity " + std::to_string(arity_));
    }
  }
  sort_unique(tuples_);
}

bool Relation::contains(const Tuple& t) const {
  return std::binary_search(tuples_.begin(), tuples_.end(), t);
}

Structure::Structure(Signature signature, std::size_t domain_size)
    : signature_(std::move(signature)), size_(domain_size) {
  if (size_ == 0) throw Error(ErrorKind::kValidation, "structure domain must be nonempty");
  for (const auto& r : signature_.relations()) {
    relation_tables_.emplace_back(table_size(r.arity), 0);
  }
  for (const auto& f : signature_.functions()) {
    function_tables_.emplace_back(table_size(f.arity), 0);
  }
}

std::size_t Structure::table_size(std::size_t arity) const {
  std::size_t total = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    total *= size_;
    if (total > kMaxTableSize) {
      throw BudgetExceeded("symbol table of arity " + std::to_string(arity) +
                           " over a domain of size " + std::to_string(size_) + " is too large");
    }
  }
  return total;
}

std::size_t Structure::tuple_index(std::span<const Element> args) const {
  std::size_t index = 0;
  for (Element a : args) {
    if (a >= size_) {
      throw Error(ErrorKind::kValidation, "element " + std::to_string(a) +
                                              " outside domain of size " + std::to_string(size_));
    }
    index = index * size_ + a;
  }
  return index;
}

Tuple Structure::tuple_at(std::size_t index, std::size_t arity) const {
  Tuple t(arity);
  for (std::size_t k = arity; k-- > 0;) {
    t[k] = static_cast<Element>(index % size_);
    index /= size_;
  }
  return t;
}

bool Structure::holds(std::size_t relation, std::span<const Element> args) const {
  const auto& decl = signature_.relations().at(relation);
  if (args.size() != decl.arity) {
    throw Error(ErrorKind::kArity, "relation '" + decl.name + "' expects " +
                                       std::to_string(decl.arity) + " arguments");
  }
  return relation_tables_[relation][tuple_index(args)] != 0;
}

Element Structure::apply(std::size_t function, std::span<const Element> args) const {
  const auto& decl = signature_.functions().at(function);
  if (args.size() != decl.arity) {
    throw Error(ErrorKind::kArity, "function '" + decl.name + "' expects " +
                                       std::to_string(decl.arity) + " arguments");
  }
  return function_tables_[function][tuple_index(args)];
}

void Structure::set_relation(std::size_t relation, std::span<const Element> args, bool value) {
  const auto& decl = signature_.relations().at(relation);
  if (args.size() != decl.arity) {
    throw Error(ErrorKind::kArity, "relation '" + decl.name + "' expects " +
                                       std::to_string(decl.arity) + " arguments");
  }
  relation_tables_[relation][tuple_index(args)] = value ? 1 : 0;
}

void Structure::set_function(std::size_t function, std::span<const Element> args,
                             Element value) {
  const auto& decl = signature_.functions().at(function);
  if (args.size() != decl.arity) {
    throw Error(ErrorKind::kArity, "function '" + decl.name + "' expects " +
                                       std::to_string(decl.arity) + " arguments");
  }
  if (value >= size_) {
    throw Error(ErrorKind::kValidation, "function '" + decl.name + "' maps outside the domain");
  }
  function_tables_[function][tuple_index(args)] = value;
}

Relation Structure::relation(std::size_t relation) const {
  const auto arity = signature_.relations().at(relation).arity;
  const auto& table = relation_tables_.at(relation);
  std::vector<Tuple> tuples;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] != 0) tuples.push_back(tuple_at(i, arity));
  }
  return Relation(arity, std::move(tuples));
}

Relation Structure::relation(std::string_view name) const {
  auto index = signature_.relation_index(name);
  if (!index) throw Error(ErrorKind::kSymbol, "unknown relation '" + std::string(name) + "'");
  return relation(*index);
}

Assignment::Assignment(std::vector<std::string> vars, Tuple values)
    : vars_(std::move(vars)), values_(std::move(values)) {
  if (vars_.size() != values_.size()) {
    throw Error(ErrorKind::kShape, "assignment needs one value per variable");
  }
  auto sorted = vars_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kValidation, "assignment variables must be distinct");
  }
}

std::optional<Element> Assignment::lookup(std::string_view var) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == var) return values_[i];
  }
  return std::nullopt;
}

Team::Team(std::vector<std::string> vars, std::vector<Tuple> rows) {
  std::vector<std::size_t> order(vars.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return vars[a] < vars[b]; });
  vars_.reserve(vars.size());
  for (auto i : order) vars_.push_back(vars[i]);
  if (std::adjacent_find(vars_.begin(), vars_.end()) != vars_.end()) {
    throw Error(ErrorKind::kValidation, "team variables must be distinct");
  }
  rows_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != vars.size()) {
      throw Error(ErrorKind::kValidation, "row " + std::to_string(r) + " has " +
                                              std::to_string(rows[r].size()) +
                                              " values, expected " +
                                              std::to_string(vars.size()));
    }
    Tuple row(order.size());
    for (std::size_t c = 0; c < order.size(); ++c) row[c] = rows[r][order[c]];
    rows_.push_back(std::move(row));
  }
  sort_unique(rows_);
}

bool Team::contains(const Tuple& row) const {
  return std::binary_search(rows_.begin(), rows_.end(), row);
}

std::optional<std::size_t> Team::column(std::string_view var) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return std::nullopt;
  return static_cast<std::size_t>(it - vars_.begin());
}

Assignment Team::assignment(std::size_t row) const { return Assignment(vars_, rows_.at(row)); }

void Team::validate(std::size_t domain_size) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < vars_.size(); ++c) {
      if (rows_[r][c] >= domain_size) {
        throw Error(ErrorKind::kValidation,
                    "row " + std::to_string(r) + ", column " + std::to_string(c) + " ('" +
                        vars_[c] + "'): value " + std::to_string(rows_[r][c]) +
                        " outside domain of size " + std::to_string(domain_size));
      }
    }
  }
}

SupplementFunction::SupplementFunction(Team base, std::vector<std::vector<Element>> images,
                                       std::size_t domain_size)
    : base_(std::move(base)), images_(std::move(images)) {
  if (images_.size() != base_.size()) {
    throw Error(ErrorKind::kValidation, "supplement function not total: " +
                                            std::to_string(images_.size()) + " images for " +
                                            std::to_string(base_.size()) + " rows");
  }
  for (std::size_t r = 0; r < images_.size(); ++r) {
    auto& image = images_[r];
    if (image.empty()) {
      throw Error(ErrorKind::kValidation,
                  "supplement function has an empty image at row " + std::to_string(r));
    }
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (image.back() >= domain_size) {
      throw Error(ErrorKind::kValidation, "supplement image outside the domain at row " +
                                              std::to_string(r));
    }
  }
}

Element term_eval(const Structure& structure, const Assignment& assignment, const Term& term) {
  if (term.is_variable()) {
    auto value = assignment.lookup(term.name);
    if (!value) throw Error(ErrorKind::kUnbound, "unbound variable '" + term.name + "'");
    return *value;
  }
  auto fn = structure.signature().function_index(term.name);
  if (!fn) throw Error(ErrorKind::kSymbol, "unknown function symbol '" + term.name + "'");
  const auto arity = structure.signature().functions()[*fn].arity;
  if (term.args.size() != arity) {
    throw Error(ErrorKind::kArity, "function '" + term.name + "' expects " +
                                       std::to_string(arity) + " arguments, got " +
                                       std::to_string(term.args.size()));
  }
  Tuple args;
  args.reserve(arity);
  for (const auto& arg : term.args) args.push_back(term_eval(structure, assignment, arg));
  return structure.apply(*fn, args);
}

Team restrict(const Team& team, const std::set<std::string>& vars) {
  std::vector<std::size_t> cols;
  std::vector<std::string> kept;
  for (const auto& v : vars) {
    auto col = team.column(v);
    if (!col) {
      throw Error(ErrorKind::kUnbound, "cannot restrict to '" + v + "': not in the team domain");
    }
    cols.push_back(*col);
    kept.push_back(v);
  }
  std::vector<Tuple> rows;
  rows.reserve(team.size());
  for (const auto& row : team.rows()) {
    Tuple r;
    r.reserve(cols.size());
    for (auto c : cols) r.push_back(row[c]);
    rows.push_back(std::move(r));
  }
  return Team(std::move(kept), std::move(rows));
}

Relation project(const Team& team, const std::vector<std::string>& vars) {
  std::vector<std::size_t> cols;
  for (const auto& v : vars) {
    auto col = team.column(v);
    if (!col) throw Error(ErrorKind::kUnbound, "unknown variable '" + v + "' in projection");
    cols.push_back(*col);
  }
  std::vector<Tuple> tuples;
  tuples.reserve(team.size());
  for (const auto& row : team.rows()) {
    Tuple t;
    t.reserve(cols.size());
    for (auto c : cols) t.push_back(row[c]);
    tuples.push_back(std::move(t));
  }
  return Relation(vars.size(), std::move(tuples));
}

Team duplicate(const Team& team, const std::string& var, const Structure& structure) {
  auto ext = extend(team, var);
  std::vector<Tuple> rows;
  rows.reserve(ext.rows.size() * structure.size());
  for (const auto& row : ext.rows) {
    for (Element a = 0; a < structure.size(); ++a) {
      rows.push_back(row);
      rows.back()[ext.column] = a;
    }
  }
  return Team(std::move(ext.vars), std::move(rows));
}

Team supplement(const Team& team, const std::string& var, const SupplementFunction& f) {
  if (!(f.base() == team)) {
    throw Error(ErrorKind::kPrecondition, "supplement function is defined on a different team");
  }
  auto ext = extend(team, var);
  std::vector<Tuple> rows;
  for (std::size_t r = 0; r < ext.rows.size(); ++r) {
    for (Element a : f.image(r)) {
      rows.push_back(ext.rows[r]);
      rows.back()[ext.column] = a;
    }
  }
  return Team(std::move(ext.vars), std::move(rows));
}

Team supplement_const(const Team& team, const std::string& var, Element value,
                      const Structure& structure) {
  if (value >= structure.size()) {
    throw Error(ErrorKind::kValidation, "element " + std::to_string(value) +
                                            " outside domain of size " +
                                            std::to_string(structure.size()));
  }
  auto ext = extend(team, var);
  for (auto& row : ext.rows) row[ext.column] = value;
  return Team(std::move(ext.vars), std::move(ext.rows));
}

Team team_union(const Team& a, const Team& b) {
  if (a.vars() != b.vars()) throw Error(ErrorKind::kShape, "union of teams over different domains");
  auto rows = a.rows();
  rows.insert(rows.end(), b.rows().begin(), b.rows().end());
  return Team(a.vars(), std::move(rows));
}

Team team_intersection(const Team& a, const Team& b) {
  if (a.vars() != b.vars()) {
    throw Error(ErrorKind::kShape, "intersection of teams over different domains");
  }
  std::vector<Tuple> rows;
  std::set_intersection(a.rows().begin(), a.rows().end(), b.rows().begin(), b.rows().end(),
                        std::back_inserter(rows));
  return Team(a.vars(), std::move(rows));
}

Team full_team(const std::vector<std::string>& vars, std::size_t domain_size) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    total *= domain_size;
    if (total > kMaxTableSize) throw BudgetExceeded("assignment space too large");
  }
  std::vector<Tuple> rows;
  rows.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    Tuple row(vars.size());
    auto rest = index;
    for (std::size_t k = vars.size(); k-- > 0;) {
      row[k] = static_cast<Element>(rest % domain_size);
      rest /= domain_size;
    }
    rows.push_back(std::move(row));
  }
  return Team(vars, std::move(rows));
}

Team subteam(const Team& team, std::uint64_t mask) {
  std::vector<Tuple> rows;
  for (std::size_t i = 0; i < team.size() && i < 64; ++i) {
    if ((mask >> i) & 1U) rows.push_back(team.rows()[i]);
  }
  return Team(team.vars(), std::move(rows));
}

std::string to_string(const Team& team) {
  std::string out = "{";
  for (std::size_t r = 0; r < team.size(); ++r) {
    if (r > 0) out += ",";
    out += "(";
    for (std::size_t c = 0; c < team.vars().size(); ++c) {
      if (c > 0) out += ",";
      out += team.vars()[c] + ":" + std::to_string(team.rows()[r][c]);
    }
    out += ")";
  }
  return out + "}";
}

std::vector<std::uint64_t> canonical_subset_order(std::size_t m) {
  if (m > 24) throw BudgetExceeded("subset enumeration over " + std::to_string(m) + " elements");
  std::vector<std::uint64_t> masks(std::size_t{1} << m);
  std::iota(masks.begin(), masks.end(), 0);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  return masks;
}

namespace {

// Radix of each enumeration slot, slots in enumeration order.
std::vector<std::uint64_t> structure_slots(const Signature& signature, std::size_t n) {
  std::vector<std::uint64_t> radix;
  auto cells = [&](std::size_t arity) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < arity; ++i) {
      total *= n;
      if (total > kMaxTableSize) throw BudgetExceeded("symbol table too large to enumerate");
    }
    return total;
  };
  for (const auto& r : signature.relations()) radix.insert(radix.end(), cells(r.arity), 2);
  for (const auto& f : signature.functions()) radix.insert(radix.end(), cells(f.arity), n);
  return radix;
}

}  // namespace

std::uint64_t structure_count(const Signature& signature, std::size_t n) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
  std::uint64_t total = 1;
  for (auto r : structure_slots(signature, n)) {
    if (total > kLimit / r) {
      throw BudgetExceeded("more than 2^40 structures of size " + std::to_string(n));
    }
    total *= r;
  }
  return total;
}

Structure structure_at(const Signature& signature, std::size_t n, std::uint64_t index) {
  if (index >= structure_count(signature, n)) {
    throw Error(ErrorKind::kPrecondition, "structure index " + std::to_string(index) + " out of range");
  }
  const auto radix = structure_slots(signature, n);
  std::vector<std::uint64_t> digits(radix.size());
  for (std::size_t k = radix.size(); k-- > 0;) {
    digits[k] = index % radix[k];
    index /= radix[k];
  }
  Structure m(signature, n);
  std::size_t slot = 0;
  for (std::size_t r = 0; r < signature.relations().size(); ++r) {
    for (auto& cell : m.mutable_relation_table(r)) cell = static_cast<std::uint8_t>(digits[slot++]);
  }
  for (std::size_t f = 0; f < signature.functions().size(); ++f) {
    for (auto& cell : m.mutable_function_table(f)) cell = static_cast<Element>(digits[slot++]);
  }
  return m;
}

}  // namespace teamlog
