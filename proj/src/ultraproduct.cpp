#include "teamlog/ultraproduct.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "teamlog/errors.hpp"

namespace teamlog {

namespace {

constexpr std::size_t kMaxPairwiseIndices = 10;

bool has_bit(IndexSet set, std::size_t i) { return ((set >> i) & 1U) != 0; }

void require_family(const std::vector<Structure>& family, const Ultrafilter& u) {
  if (family.size() != u.index_count()) {
    throw Error(ErrorKind::kShape, "family has " + std::to_string(family.size()) +
                                       " structures but the index set has " +
                                       std::to_string(u.index_count()));
  }
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (!(family[i].signature() == family[0].signature())) {
      throw Error(ErrorKind::kShape, "signature mismatch at index " + std::to_string(i));
    }
  }
}

void require_teams(const std::vector<Team>& teams, std::size_t count, const char* what) {
  if (teams.size() != count) {
    throw Error(ErrorKind::kShape, std::string(what) + ": expected " + std::to_string(count) +
                                       " teams, got " + std::to_string(teams.size()));
  }
  for (std::size_t i = 1; i < teams.size(); ++i) {
    if (teams[i].vars() != teams[0].vars()) {
      throw Error(ErrorKind::kShape,
                  std::string(what) + ": team domain mismatch at index " + std::to_string(i));
    }
  }
}

/// Coordinate i of the representatives of the given classes.
Tuple coordinate(const Ultraproduct& product, const std::vector<Element>& classes, std::size_t i) {
  Tuple out;
  out.reserve(classes.size());
  for (auto c : classes) out.push_back(product.representative[c][i]);
  return out;
}

/// Iterates all vectors v with v[j] < bounds[j]; false when exhausted.
bool advance(std::vector<std::size_t>& v, const std::vector<std::size_t>& bounds) {
  for (std::size_t j = v.size(); j-- > 0;) {
    if (++v[j] < bounds[j]) return true;
    v[j] = 0;
  }
  return false;
}

Team product_of(const Ultraproduct& product, const std::vector<Team>& teams,
                const Ultrafilter& u) {
  return team_ultraproduct(product, teams, u);
}

}  // namespace

Ultrafilter::Ultrafilter(std::size_t index_count, std::size_t generator, std::vector<bool> member)
    : index_count_(index_count), generator_(generator), member_(std::move(member)) {}

Ultrafilter Ultrafilter::principal(std::size_t index_count, std::size_t generator) {
  if (index_count == 0 || index_count > kMaxIndices) {
    throw Error(ErrorKind::kPrecondition, "index sets must have 1 to 16 elements");
  }
  if (generator >= index_count) {
    throw Error(ErrorKind::kPrecondition, "generator outside the index set");
  }
  std::vector<bool> member(std::size_t{1} << index_count);
  for (std::size_t a = 0; a < member.size(); ++a) {
    member[a] = has_bit(static_cast<IndexSet>(a), generator);
  }
  return Ultrafilter(index_count, generator, std::move(member));
}

bool Ultrafilter::contains(IndexSet set) const {
  if ((set & ~full()) != 0) throw Error(ErrorKind::kPrecondition, "set outside the index set");
  return member_[set];
}

std::vector<IndexSet> Ultrafilter::members() const {
  std::vector<IndexSet> out;
  for (std::size_t a = 0; a < member_.size(); ++a) {
    if (member_[a]) out.push_back(static_cast<IndexSet>(a));
  }
  return out;
}

bool Ultrafilter::satisfies_axioms() const {
  const IndexSet all = full();
  if (member_[0] || !member_[all]) return false;
  for (IndexSet a = 0; a <= all; ++a) {
    if (member_[a] == member_[all & ~a]) return false;
    if (member_[a] != has_bit(a, generator_)) return false;
    for (std::size_t i = 0; i < index_count_; ++i) {
      if (member_[a] && !member_[a | (1U << i)]) return false;
    }
  }
  if (index_count_ <= kMaxPairwiseIndices) {
    for (IndexSet a = 0; a <= all; ++a) {
      if (!member_[a]) continue;
      for (IndexSet b = 0; b <= all; ++b) {
        if (member_[b] && !member_[a & b]) return false;
      }
    }
  }
  return true;
}

Ultrafilter ultrafilter_from_fip(std::size_t index_count, const std::vector<IndexSet>& family) {
  if (index_count == 0 || index_count > kMaxIndices) {
    throw Error(ErrorKind::kPrecondition, "index sets must have 1 to 16 elements");
  }
  const IndexSet all = static_cast<IndexSet>((1U << index_count) - 1);
  IndexSet meet = all;
  for (auto set : family) {
    if ((set & ~all) != 0) throw Error(ErrorKind::kPrecondition, "set outside the index set");
    meet &= set;
  }
  if (meet == 0) {
    throw Error(ErrorKind::kNoUltrafilter, "requires non-principal ultrafilter (infinite I)");
  }
  return Ultrafilter::principal(index_count, static_cast<std::size_t>(std::countr_zero(meet)));
}

std::uint64_t Ultraproduct::code(const Tuple& f) const {
  if (f.size() != radix.size()) throw Error(ErrorKind::kShape, "product element of wrong length");
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] >= radix[i]) throw Error(ErrorKind::kValidation, "coordinate outside its domain");
    out = out * radix[i] + f[i];
  }
  return out;
}

Tuple Ultraproduct::element(std::uint64_t code) const {
  Tuple f(radix.size());
  for (std::size_t i = radix.size(); i-- > 0;) {
    f[i] = static_cast<Element>(code % radix[i]);
    code /= radix[i];
  }
  return f;
}

Ultraproduct product_structure(const std::vector<Structure>& family, const Ultrafilter& u,
                               std::size_t budget) {
  require_family(family, u);
  std::vector<std::size_t> radix;
  std::size_t total = 1;
  for (const auto& m : family) {
    radix.push_back(m.size());
    total *= m.size();
    if (total > budget) {
      throw BudgetExceeded("product of domains exceeds " + std::to_string(budget) + " elements");
    }
  }
  const std::size_t k = family.size();
  std::vector<Element> class_of(total);
  std::vector<Tuple> reps;
  // f ≡ g iff their agreement set is in U; each f is compared with the
  // representative of every class opened so far.
  Ultraproduct scratch{Structure(family[0].signature(), 1), radix, {}, {}};
  for (std::uint64_t code = 0; code < total; ++code) {
    const Tuple f = scratch.element(code);
    std::optional<Element> found;
    for (std::size_t c = 0; c < reps.size() && !found; ++c) {
      IndexSet agree = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (reps[c][i] == f[i]) agree |= 1U << i;
      }
      if (u.contains(agree)) found = static_cast<Element>(c);
    }
    if (!found) {
      found = static_cast<Element>(reps.size());
      reps.push_back(f);
    }
    class_of[code] = *found;
  }

  const auto& sig = family[0].signature();
  Ultraproduct out{Structure(sig, reps.size()), radix, std::move(class_of), std::move(reps)};
  auto& m = out.structure;
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const std::size_t arity = sig.relations()[r].arity;
    const std::size_t cells = m.table_size(arity);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      const Tuple classes = m.tuple_at(idx, arity);
      IndexSet holding = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (family[i].holds(r, coordinate(out, classes, i))) holding |= 1U << i;
      }
      m.set_relation(r, classes, u.contains(holding));
    }
  }
  for (std::size_t fn = 0; fn < sig.functions().size(); ++fn) {
    const std::size_t arity = sig.functions()[fn].arity;
    const std::size_t cells = m.table_size(arity);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      const Tuple classes = m.tuple_at(idx, arity);
      Tuple value(k);
      for (std::size_t i = 0; i < k; ++i) value[i] = family[i].apply(fn, coordinate(out, classes, i));
      m.set_function(fn, classes, out.class_of_tuple(value));
    }
  }
  return out;
}

Team team_ultraproduct(const Ultraproduct& product, const std::vector<Team>& teams,
                       const Ultrafilter& u, std::uint64_t budget) {
  const std::size_t k = product.radix.size();
  require_teams(teams, k, "team ultraproduct");
  for (std::size_t i = 0; i < k; ++i) teams[i].validate(product.radix[i]);
  const auto& vars = teams[0].vars();
  const std::size_t d = vars.size();
  const std::uint64_t total = product.class_of.size();
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < d; ++j) {
    count *= total;
    if (count > budget) {
      throw BudgetExceeded("team ultraproduct needs more than " + std::to_string(budget) +
                           " product assignments");
    }
  }
  std::vector<Tuple> elements(total);
  for (std::uint64_t c = 0; c < total; ++c) elements[c] = product.element(c);

  // One product element per variable; s_i reads coordinate i of each.
  std::set<Tuple> rows;
  std::vector<std::size_t> codes(d, 0);
  const std::vector<std::size_t> bounds(d, total);
  Tuple s_i(d);
  do {
    IndexSet member = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < d; ++j) s_i[j] = elements[codes[j]][i];
      if (teams[i].contains(s_i)) member |= 1U << i;
    }
    if (u.contains(member)) {
      Tuple row(d);
      for (std::size_t j = 0; j < d; ++j) row[j] = product.class_of[codes[j]];
      rows.insert(std::move(row));
    }
  } while (advance(codes, bounds));
  return Team(vars, std::vector<Tuple>(rows.begin(), rows.end()));
}

std::string to_string(LemmaKind kind) {
  switch (kind) {
    case LemmaKind::kUnion: return "union";
    case LemmaKind::kDisjointness: return "disjointness";
    case LemmaKind::kConstSupplement: return "const-supplement";
    case LemmaKind::kDuplicate: return "duplicate";
    case LemmaKind::kSupplement: return "supplement";
  }
  return "union";
}

std::optional<LemmaKind> lemma_kind_from_string(const std::string& text) {
  for (auto kind : {LemmaKind::kUnion, LemmaKind::kDisjointness, LemmaKind::kConstSupplement,
                    LemmaKind::kDuplicate, LemmaKind::kSupplement}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

namespace {

/// F(s) = {f/U : f ∈ Π F_i(s_i)} for every representative (s_i) of s with
/// {i : s_i ∈ X_i} ∈ U. Coordinates outside X_i range over all of M_i; they
/// never change the class of f.
std::vector<Element> lifted_image(const Ultraproduct& product, const std::vector<Team>& xs,
                                  const std::vector<SupplementFunction>& fs,
                                  const Tuple& row, const Ultrafilter& u) {
  const std::size_t k = product.radix.size();
  const std::size_t d = row.size();
  std::vector<std::vector<std::uint64_t>> members(d);
  for (std::uint64_t c = 0; c < product.class_of.size(); ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      if (product.class_of[c] == row[j]) members[j].push_back(c);
    }
  }
  std::vector<std::size_t> bounds(d);
  for (std::size_t j = 0; j < d; ++j) bounds[j] = members[j].size();
  std::set<Element> image;
  std::vector<std::size_t> pick(d, 0);
  do {
    std::vector<std::optional<std::size_t>> in_x(k);
    IndexSet member = 0;
    for (std::size_t i = 0; i < k; ++i) {
      Tuple s_i(d);
      for (std::size_t j = 0; j < d; ++j) s_i[j] = product.element(members[j][pick[j]])[i];
      const auto& rows = xs[i].rows();
      const auto it = std::lower_bound(rows.begin(), rows.end(), s_i);
      if (it != rows.end() && *it == s_i) {
        in_x[i] = static_cast<std::size_t>(it - rows.begin());
        member |= 1U << i;
      }
    }
    if (!u.contains(member)) continue;
    std::vector<std::vector<Element>> choices(k);
    std::vector<std::size_t> sizes(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (in_x[i]) {
        choices[i] = fs[i].image(*in_x[i]);
      } else {
        for (Element a = 0; a < product.radix[i]; ++a) choices[i].push_back(a);
      }
      sizes[i] = choices[i].size();
    }
    std::vector<std::size_t> at(k, 0);
    do {
      Tuple f(k);
      for (std::size_t i = 0; i < k; ++i) f[i] = choices[i][at[i]];
      image.insert(product.class_of_tuple(f));
    } while (advance(at, sizes));
  } while (advance(pick, bounds));
  return std::vector<Element>(image.begin(), image.end());
}

}  // namespace

LemmaCheck check_team_lemma(const LemmaInput& input, LemmaKind kind, const Ultrafilter& u) {
  const auto& ms = input.structures;
  const auto product = product_structure(ms, u);
  const std::size_t k = ms.size();
  require_teams(input.xs, k, "X family");
  LemmaCheck out;
  out.kind = kind;
  const Team x = product_of(product, input.xs, u);

  switch (kind) {
    case LemmaKind::kUnion:
    case LemmaKind::kDisjointness: {
      require_teams(input.ys, k, "Y family");
      if (input.ys[0].vars() != input.xs[0].vars()) {
        throw Error(ErrorKind::kShape, "X and Y families have different domains");
      }
      const Team y = product_of(product, input.ys, u);
      IndexSet disjoint = 0;
      std::vector<Team> unions;
      for (std::size_t i = 0; i < k; ++i) {
        if (team_intersection(input.xs[i], input.ys[i]).empty()) disjoint |= 1U << i;
        unions.push_back(team_union(input.xs[i], input.ys[i]));
      }
      out.side_premise = u.contains(disjoint);
      const Team meet = team_intersection(x, y);
      out.side_holds = !out.side_premise || meet.empty();
      if (kind == LemmaKind::kUnion) {
        out.lhs = team_union(x, y);
        out.rhs = product_of(product, unions, u);
        out.holds = out.lhs == out.rhs && out.side_holds;
        out.detail = "X ∪ Y against the product of the X_i ∪ Y_i";
      } else {
        out.lhs = meet;
        out.rhs = Team(x.vars(), {});
        out.holds = out.side_holds;
        out.detail = out.side_premise ? "X_i, Y_i disjoint for U-many i; X ∩ Y shown"
                                      : "premise fails: X_i, Y_i disjoint for too few i";
      }
      return out;
    }
    case LemmaKind::kConstSupplement: {
      if (input.elements.size() != k) {
        throw Error(ErrorKind::kShape, "const-supplement needs one element per index");
      }
      const Element a = product.class_of_tuple(input.elements);
      out.lhs = supplement_const(x, input.var, a, product.structure);
      std::vector<Team> parts;
      for (std::size_t i = 0; i < k; ++i) {
        parts.push_back(supplement_const(input.xs[i], input.var, input.elements[i], ms[i]));
      }
      out.rhs = product_of(product, parts, u);
      out.holds = out.lhs == out.rhs;
      out.detail = "X(a/x) against the product of the X_i(a_i/x)";
      return out;
    }
    case LemmaKind::kDuplicate: {
      out.lhs = duplicate(x, input.var, product.structure);
      std::vector<Team> parts;
      for (std::size_t i = 0; i < k; ++i) parts.push_back(duplicate(input.xs[i], input.var, ms[i]));
      out.rhs = product_of(product, parts, u);
      out.holds = out.lhs == out.rhs;
      out.detail = "X(M/x) against the product of the X_i(M_i/x)";
      return out;
    }
    case LemmaKind::kSupplement: {
      if (input.images.size() != k) {
        throw Error(ErrorKind::kShape, "supplement needs one function per index");
      }
      std::vector<SupplementFunction> fs;
      IndexSet singular = 0;
      std::vector<Team> parts;
      for (std::size_t i = 0; i < k; ++i) {
        fs.emplace_back(input.xs[i], input.images[i], ms[i].size());
        bool all_single = true;
        for (const auto& img : fs.back().images()) all_single = all_single && img.size() == 1;
        if (all_single) singular |= 1U << i;
        parts.push_back(supplement(input.xs[i], input.var, fs.back()));
      }
      std::vector<std::vector<Element>> images;
      for (const auto& row : x.rows()) images.push_back(lifted_image(product, input.xs, fs, row, u));
      bool lifted_single = true;
      for (const auto& img : images) lifted_single = lifted_single && img.size() == 1;
      out.lhs = supplement(x, input.var, SupplementFunction(x, images, product.structure.size()));
      out.rhs = product_of(product, parts, u);
      out.side_premise = u.contains(singular);
      out.side_holds = !out.side_premise || lifted_single;
      out.holds = out.lhs == out.rhs && out.side_holds;
      out.detail = "X(F/x) against the product of the X_i(F_i/x)";
      return out;
    }
  }
  return out;
}

bool strong_los_eligible(const FragmentLabel& label) {
  return !label.lax_or && !label.strict_or && !label.lax_exists && !label.strict_exists &&
         !label.impl;
}

bool weak_los_eligible(const Formula& phi) {
  switch (phi.op) {
    case Op::kImpl: return false;
    case Op::kWeakNeg:
    case Op::kClassNeg: return strong_los_eligible(fragment_of(phi.body()));
    case Op::kAnd:
    case Op::kOr:
    case Op::kOrStrict:
    case Op::kIntOr: return weak_los_eligible(phi.left()) && weak_los_eligible(phi.right());
    case Op::kExists:
    case Op::kExistsStrict:
    case Op::kForall:
    case Op::kExists1:
    case Op::kForall1: return weak_los_eligible(phi.body());
    default: return true;
  }
}

LosRecord check_los(const std::vector<Structure>& structures, const std::vector<Team>& teams,
                    const Ultrafilter& u, const Formula& phi, const EvalOptions& options) {
  const auto product = product_structure(structures, u);
  require_teams(teams, structures.size(), "Łoś check");
  LosRecord out;
  for (std::size_t i = 0; i < structures.size(); ++i) {
    if (eval(structures[i], teams[i], phi, options)) out.satisfied |= 1U << i;
  }
  out.lhs = u.contains(out.satisfied);
  out.rhs = eval(product.structure, product_of(product, teams, u), phi, options);
  out.strong_claimed = strong_los_eligible(fragment_of(phi));
  out.weak_claimed = weak_los_eligible(phi);
  return out;
}

IsomorphismCheck check_principal_isomorphism(const std::vector<Structure>& structures,
                                             const std::vector<Team>& teams,
                                             const Ultrafilter& u) {
  const auto product = product_structure(structures, u);
  const std::size_t j = u.generator();
  const auto& mj = structures[j];
  const auto& m = product.structure;
  IsomorphismCheck out;
  std::vector<Element> map(m.size());
  std::vector<bool> hit(mj.size());
  out.bijective = m.size() == mj.size();
  for (Element c = 0; c < m.size(); ++c) {
    map[c] = product.representative[c][j];
    if (hit[map[c]]) out.bijective = false;
    hit[map[c]] = true;
  }
  auto image = [&](const Tuple& t) {
    Tuple out_t;
    for (auto c : t) out_t.push_back(map[c]);
    return out_t;
  };
  const auto& sig = m.signature();
  out.relations = true;
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const std::size_t arity = sig.relations()[r].arity;
    for (std::size_t idx = 0; idx < m.table_size(arity); ++idx) {
      const Tuple t = m.tuple_at(idx, arity);
      if (m.holds(r, t) != mj.holds(r, image(t))) out.relations = false;
    }
  }
  out.functions = true;
  for (std::size_t fn = 0; fn < sig.functions().size(); ++fn) {
    const std::size_t arity = sig.functions()[fn].arity;
    for (std::size_t idx = 0; idx < m.table_size(arity); ++idx) {
      const Tuple t = m.tuple_at(idx, arity);
      if (map[m.apply(fn, t)] != mj.apply(fn, image(t))) out.functions = false;
    }
  }
  if (!teams.empty()) {
    const Team x = product_of(product, teams, u);
    std::vector<Tuple> rows;
    for (const auto& row : x.rows()) rows.push_back(image(row));
    out.team = Team(x.vars(), rows) == teams[j];
  }
  return out;
}

}  // namespace teamlog
