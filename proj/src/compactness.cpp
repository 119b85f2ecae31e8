#include "teamlog/compactness.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "teamlog/errors.hpp"
#include "teamlog/parser.hpp"

namespace teamlog {

namespace {

std::vector<std::string> mask_vars(const std::vector<std::string>& variables, IndexMask index) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if ((index >> i) & 1U) out.push_back(variables[i]);
  }
  return out;
}

std::vector<Term> var_terms(const std::vector<std::string>& vars) {
  std::vector<Term> out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.push_back(Term::var(v));
  return out;
}

std::size_t arity_of(IndexMask index) { return static_cast<std::size_t>(std::popcount(index)); }

bool canonical_less(IndexMask a, IndexMask b) {
  const auto pa = std::popcount(a);
  const auto pb = std::popcount(b);
  return pa != pb ? pa < pb : a < b;
}

/// Positions within J's increasing enumeration of the members of I ⊆ J.
std::vector<std::size_t> positions_in(IndexMask sub, IndexMask super) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    if (!((super >> i) & 1U)) continue;
    if ((sub >> i) & 1U) out.push_back(pos);
    ++pos;
  }
  return out;
}

Relation project_relation(const Relation& r, const std::vector<std::size_t>& cols) {
  std::vector<Tuple> tuples;
  tuples.reserve(r.size());
  for (const auto& t : r.tuples()) {
    Tuple p;
    p.reserve(cols.size());
    for (auto c : cols) p.push_back(t[c]);
    tuples.push_back(std::move(p));
  }
  return Relation(cols.size(), std::move(tuples));
}

std::size_t require_symbol(const Signature& sig, const std::string& name, std::size_t arity) {
  const auto idx = sig.relation_index(name);
  if (!idx) throw Error(ErrorKind::kSymbol, "vocabulary mismatch: missing relation '" + name + "'");
  if (sig.relations()[*idx].arity != arity) {
    throw Error(ErrorKind::kArity, "vocabulary mismatch: '" + name + "' should have arity " +
                                       std::to_string(arity));
  }
  return *idx;
}

std::vector<SymbolDecl> generated_symbols(const GammaSpec& gamma) {
  std::vector<SymbolDecl> out;
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    out.push_back({r_name(k), arity_of(gamma.index_set(k))});
  }
  for (auto index : gamma.family()) out.push_back({s_name(index), arity_of(index)});
  return out;
}

}  // namespace

GammaSpec GammaSpec::make(std::vector<Formula> formulas, std::vector<std::string> variables) {
  const auto fv = free_vars(formulas);
  if (variables.empty()) variables.assign(fv.begin(), fv.end());
  const std::set<std::string> seen(variables.begin(), variables.end());
  if (seen.size() != variables.size()) {
    throw Error(ErrorKind::kValidation, "variable enumeration must be duplicate-free");
  }
  for (const auto& v : fv) {
    if (!seen.count(v)) {
      throw Error(ErrorKind::kUnbound, "variable enumeration misses free variable '" + v + "'");
    }
  }
  if (variables.size() > kMaxKappa) {
    throw Error(ErrorKind::kPrecondition, "enumeration of " + std::to_string(variables.size()) +
                                              " variables exceeds the limit of " +
                                              std::to_string(kMaxKappa));
  }
  return GammaSpec{std::move(formulas), std::move(variables)};
}

IndexMask GammaSpec::index_set(std::size_t k) const {
  const auto fv = free_vars(formulas.at(k));
  IndexMask out = 0;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (fv.count(variables[i])) out |= IndexMask{1} << i;
  }
  return out;
}

std::vector<IndexMask> GammaSpec::family() const {
  std::vector<IndexMask> out;
  for (auto m : canonical_subset_order(kappa())) out.push_back(static_cast<IndexMask>(m));
  return out;
}

std::vector<std::string> GammaSpec::vars_of(IndexMask index) const {
  return mask_vars(variables, index);
}

std::string r_name(std::size_t k) { return "R_" + std::to_string(k); }

std::string index_set_string(IndexMask index) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < 32; ++i) {
    if (!((index >> i) & 1U)) continue;
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

std::string s_name(IndexMask index) {
  auto inner = index_set_string(index);
  return "S[" + inner.substr(1, inner.size() - 2) + "]";
}

std::size_t expected_sentence_count(const GammaSpec& gamma) {
  std::size_t pairs = 1;
  for (std::size_t i = 0; i < gamma.kappa(); ++i) pairs *= 3;
  return 2 * gamma.formulas.size() + pairs;
}

DeltaGamma build_delta_gamma(const GammaSpec& gamma, const Signature& base) {
  const auto extra = generated_symbols(gamma);
  for (const auto& decl : extra) {
    if (base.has_symbol(decl.name)) {
      throw Error(ErrorKind::kSymbol, "generated symbol '" + decl.name + "' already in signature");
    }
  }
  DeltaGamma out;
  out.signature = base.with_relations(extra);
  const auto family = gamma.family();

  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    const auto vars = gamma.vars_of(gamma.index_set(k));
    out.sentences.push_back(FoFormula::exists(vars, FoFormula::rel(r_name(k), var_terms(vars))));
    out.schema.push_back(1);
  }
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    const auto index = gamma.index_set(k);
    const auto vars = gamma.vars_of(index);
    out.sentences.push_back(FoFormula::forall(
        vars, FoFormula::iff(FoFormula::rel(r_name(k), var_terms(vars)),
                             FoFormula::rel(s_name(index), var_terms(vars)))));
    out.schema.push_back(2);
  }
  for (auto sub : family) {
    for (auto super : family) {
      if ((sub & super) != sub) continue;
      const auto inner = gamma.vars_of(sub);
      const auto outer = gamma.vars_of(super & ~sub);
      const auto all = gamma.vars_of(super);
      out.sentences.push_back(FoFormula::forall(
          inner, FoFormula::iff(FoFormula::rel(s_name(sub), var_terms(inner)),
                                FoFormula::exists(outer, FoFormula::rel(s_name(super),
                                                                        var_terms(all))))));
      out.schema.push_back(3);
    }
  }
  return out;
}

IntuitionRecord check_intuition(const Structure& structure, const GammaSpec& gamma) {
  const auto& sig = structure.signature();
  for (const auto& decl : generated_symbols(gamma)) require_symbol(sig, decl.name, decl.arity);

  IntuitionRecord out;
  // The base vocabulary is the structure's minus the generated symbols.
  std::vector<SymbolDecl> base_relations;
  const auto generated = generated_symbols(gamma);
  std::set<std::string> generated_names;
  for (const auto& d : generated) generated_names.insert(d.name);
  for (const auto& d : sig.relations()) {
    if (!generated_names.count(d.name)) base_relations.push_back(d);
  }
  const Signature base(base_relations, sig.functions());
  const auto delta = build_delta_gamma(gamma, base);
  out.models_delta = std::all_of(delta.sentences.begin(), delta.sentences.end(),
                                 [&](const FoFormula& s) { return eval_fo(structure, s, {}); });

  out.cond1 = true;
  out.cond2 = true;
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    const auto r = structure.relation(r_name(k));
    if (r.empty()) out.cond1 = false;
    if (r != structure.relation(s_name(gamma.index_set(k)))) out.cond2 = false;
  }
  out.cond3 = true;
  const auto family = gamma.family();
  for (auto super : family) {
    const auto big = structure.relation(s_name(super));
    for (auto sub : family) {
      if ((sub & super) != sub) continue;
      if (structure.relation(s_name(sub)) != project_relation(big, positions_in(sub, super))) {
        out.cond3 = false;
      }
    }
  }
  return out;
}

bool Expansion::verified() const {
  return intuition.all() &&
         std::all_of(crosschecks.begin(), crosschecks.end(),
                     [](const std::optional<Crosscheck>& c) { return !c || c->agree(); });
}

Expansion expand_model(const Structure& structure, const Team& team, const GammaSpec& gamma,
                       const ExpansionOptions& options) {
  if (team.empty()) throw Error(ErrorKind::kPrecondition, "the team must be nonempty");
  for (const auto& v : gamma.variables) {
    if (!team.column(v)) {
      throw Error(ErrorKind::kPrecondition, "team domain lacks enumerated variable '" + v + "'");
    }
  }
  team.validate(structure.size());
  for (const auto& phi : gamma.formulas) {
    if (!eval(structure, team, phi, options.eval)) {
      throw Error(ErrorKind::kPrecondition, "the team does not satisfy " + format(phi));
    }
  }

  const auto delta_sig = structure.signature().with_relations(generated_symbols(gamma));
  Structure expanded(delta_sig, structure.size());
  const auto& base = structure.signature();
  for (std::size_t r = 0; r < base.relations().size(); ++r) {
    expanded.mutable_relation_table(r) = structure.relation_table(r);
  }
  for (std::size_t f = 0; f < base.functions().size(); ++f) {
    expanded.mutable_function_table(f) = structure.function_table(f);
  }
  auto fill = [&](const std::string& name, const std::vector<std::string>& vars) {
    const auto idx = *delta_sig.relation_index(name);
    const auto projected = project(team, vars);
    for (const auto& t : projected.tuples()) expanded.set_relation(idx, t, true);
  };
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    fill(r_name(k), gamma.vars_of(gamma.index_set(k)));
  }
  for (auto index : gamma.family()) fill(s_name(index), gamma.vars_of(index));

  Expansion out{std::move(expanded), {}, {}};
  out.intuition = check_intuition(out.structure, gamma);
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    std::optional<Crosscheck> check;
    if (options.crosscheck) {
      const auto fv = gamma.vars_of(gamma.index_set(k));
      try {
        check = crosscheck(structure, restrict(team, {fv.begin(), fv.end()}), gamma.formulas[k],
                           fv, options.eso);
      } catch (const BudgetExceeded&) {
        throw;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kFragment) throw;
      }
    }
    out.crosschecks.push_back(check);
  }
  return out;
}

Mutation random_breaking_mutation(const Structure& expanded, const GammaSpec& gamma, Rng& rng) {
  const IndexMask top = gamma.kappa() == 0 ? 0 : (IndexMask{1} << gamma.kappa()) - 1;
  std::vector<SymbolDecl> sites;
  bool top_bound = false;
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    const auto index = gamma.index_set(k);
    sites.push_back({r_name(k), arity_of(index)});
    if (index == top) top_bound = true;
  }
  for (auto index : gamma.family()) {
    if (index != top || top_bound) sites.push_back({s_name(index), arity_of(index)});
  }
  if (sites.empty()) throw Error(ErrorKind::kPrecondition, "no breaking mutation exists");
  const auto& site = sites[pick(rng, sites.size())];
  const auto cells = expanded.table_size(site.arity);
  return {site.name, expanded.tuple_at(pick(rng, cells), site.arity)};
}

Structure apply_mutation(const Structure& structure, const Mutation& mutation) {
  Structure out = structure;
  const auto idx = out.signature().relation_index(mutation.symbol);
  if (!idx) throw Error(ErrorKind::kSymbol, "unknown relation '" + mutation.symbol + "'");
  out.set_relation(*idx, mutation.tuple, !out.holds(*idx, mutation.tuple));
  return out;
}

CoherenceSystem coherence_system(const Structure& expanded, const GammaSpec& gamma) {
  CoherenceSystem out;
  out.variables = gamma.variables;
  out.domain_size = expanded.size();
  for (auto index : gamma.family()) {
    require_symbol(expanded.signature(), s_name(index), arity_of(index));
    out.family.emplace(index, expanded.relation(s_name(index)));
  }
  return out;
}

MergeResult merge_teams(const CoherenceSystem& system) {
  const std::size_t kappa = system.variables.size();
  const std::size_t n = system.domain_size;
  if (kappa > kMaxKappa) {
    throw Error(ErrorKind::kShape, "enumeration exceeds " + std::to_string(kMaxKappa) + " variables");
  }
  if (n == 0) throw Error(ErrorKind::kShape, "domain size must be positive");
  const IndexMask top = kappa == 0 ? 0 : (IndexMask{1} << kappa) - 1;
  for (const auto& [index, rel] : system.family) {
    if ((index & ~top) != 0) {
      throw Error(ErrorKind::kShape, "index set " + index_set_string(index) +
                                         " lies outside the enumeration");
    }
    if (rel.arity() != arity_of(index)) {
      throw Error(ErrorKind::kShape, "relation for " + index_set_string(index) + " has arity " +
                                         std::to_string(rel.arity()));
    }
    for (const auto& t : rel.tuples()) {
      for (auto v : t) {
        if (v >= n) {
          throw Error(ErrorKind::kShape, "relation for " + index_set_string(index) +
                                             " mentions element " + std::to_string(v));
        }
      }
    }
  }
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < kappa; ++i) space *= n;
  const std::uint64_t work = space * std::max<std::uint64_t>(1, system.family.size());
  if (work > (std::uint64_t{1} << 26)) {
    throw BudgetExceeded("merge over " + std::to_string(space) + " tuples and " +
                         std::to_string(system.family.size()) + " index sets");
  }

  std::vector<std::pair<std::vector<std::size_t>, const Relation*>> checks;
  for (const auto& [index, rel] : system.family) {
    checks.emplace_back(positions_in(index, top), &rel);
  }
  std::vector<Tuple> rows;
  Tuple a(kappa, 0);
  Tuple p;
  for (std::uint64_t code = 0; code < space; ++code) {
    std::uint64_t c = code;
    for (std::size_t i = kappa; i-- > 0;) {
      a[i] = static_cast<Element>(c % n);
      c /= n;
    }
    const bool keep = std::all_of(checks.begin(), checks.end(), [&](const auto& check) {
      p.clear();
      for (auto col : check.first) p.push_back(a[col]);
      return check.second->contains(p);
    });
    if (keep) rows.push_back(a);
  }

  MergeResult out;
  out.candidate = Team(system.variables, std::move(rows));
  std::vector<IndexMask> order;
  for (const auto& entry : system.family) order.push_back(entry.first);
  std::sort(order.begin(), order.end(), canonical_less);
  for (auto index : order) {
    if (project(out.candidate, mask_vars(system.variables, index)) != system.family.at(index)) {
      out.failure = index;
      break;
    }
  }
  out.verified = !out.failure;
  if (out.verified) out.team = out.candidate;
  return out;
}

}  // namespace teamlog
