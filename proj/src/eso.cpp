#include "teamlog/eso.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "teamlog/errors.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/parser.hpp"

namespace teamlog {

// ---------------------------------------------------------------------------
// Construction and printing

FoFormula FoFormula::falsity() {
  FoFormula out;
  out.kind = Kind::kFalse;
  return out;
}

FoFormula FoFormula::eq(Term a, Term b) {
  FoFormula out;
  out.kind = Kind::kEq;
  out.terms = {std::move(a), std::move(b)};
  return out;
}

FoFormula FoFormula::rel(std::string symbol, std::vector<Term> args) {
  FoFormula out;
  out.kind = Kind::kRel;
  out.name = std::move(symbol);
  out.terms = std::move(args);
  return out;
}

FoFormula FoFormula::rel_var(std::string name, const std::vector<std::string>& args) {
  FoFormula out;
  out.kind = Kind::kRelVar;
  out.name = std::move(name);
  for (const auto& a : args) out.terms.push_back(Term::var(a));
  return out;
}

FoFormula FoFormula::negate(FoFormula a) {
  FoFormula out;
  out.kind = Kind::kNot;
  out.children = {std::move(a)};
  return out;
}

namespace {

FoFormula nary(FoFormula::Kind kind, std::vector<FoFormula> parts, FoFormula unit) {
  if (parts.empty()) return unit;
  if (parts.size() == 1) return std::move(parts[0]);
  FoFormula out;
  out.kind = kind;
  out.children = std::move(parts);
  return out;
}

FoFormula binary(FoFormula::Kind kind, FoFormula a, FoFormula b) {
  FoFormula out;
  out.kind = kind;
  out.children = {std::move(a), std::move(b)};
  return out;
}

FoFormula quantified(FoFormula::Kind kind, std::string var, FoFormula body) {
  FoFormula out;
  out.kind = kind;
  out.var = std::move(var);
  out.children = {std::move(body)};
  return out;
}

}  // namespace

FoFormula FoFormula::conj(std::vector<FoFormula> parts) {
  return nary(Kind::kAnd, std::move(parts), truth());
}

FoFormula FoFormula::disj(std::vector<FoFormula> parts) {
  return nary(Kind::kOr, std::move(parts), falsity());
}

FoFormula FoFormula::implies(FoFormula a, FoFormula b) {
  return binary(Kind::kImplies, std::move(a), std::move(b));
}

FoFormula FoFormula::iff(FoFormula a, FoFormula b) {
  return binary(Kind::kIff, std::move(a), std::move(b));
}

FoFormula FoFormula::exists(std::string var, FoFormula body) {
  return quantified(Kind::kExists, std::move(var), std::move(body));
}

FoFormula FoFormula::forall(std::string var, FoFormula body) {
  return quantified(Kind::kForall, std::move(var), std::move(body));
}

FoFormula FoFormula::exists(const std::vector<std::string>& vars, FoFormula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = exists(*it, std::move(body));
  return body;
}

FoFormula FoFormula::forall(const std::vector<std::string>& vars, FoFormula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = forall(*it, std::move(body));
  return body;
}

namespace {

std::string join_terms(const std::vector<Term>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += ",";
    out += to_string(terms[i]);
  }
  return out;
}

std::string emit(const FoFormula& phi);

/// Binding strength; quantifiers extend as far right as possible.
int level(const FoFormula& phi) {
  using K = FoFormula::Kind;
  switch (phi.kind) {
    case K::kIff: return 1;
    case K::kImplies: return 2;
    case K::kOr: return 3;
    case K::kAnd: return 4;
    case K::kExists:
    case K::kForall: return 0;
    default: return 5;
  }
}

std::string operand(const FoFormula& phi, int min_level, bool rightmost) {
  const int own = level(phi);
  const bool bare = own >= min_level || (own == 0 && rightmost);
  return bare ? emit(phi) : "(" + emit(phi) + ")";
}

std::string emit(const FoFormula& phi) {
  using K = FoFormula::Kind;
  switch (phi.kind) {
    case K::kTrue: return "true";
    case K::kFalse: return "false";
    case K::kEq: return to_string(phi.terms[0]) + " = " + to_string(phi.terms[1]);
    case K::kRel:
    case K::kRelVar: return phi.name + "(" + join_terms(phi.terms) + ")";
    case K::kNot:
      if (phi.children[0].kind == K::kEq) {
        return to_string(phi.children[0].terms[0]) + " != " + to_string(phi.children[0].terms[1]);
      }
      return "!" + operand(phi.children[0], 5, false);
    case K::kAnd:
    case K::kOr: {
      const char* sep = phi.kind == K::kAnd ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < phi.children.size(); ++i) {
        if (i > 0) out += sep;
        out += operand(phi.children[i], level(phi) + 1, i + 1 == phi.children.size());
      }
      return out;
    }
    case K::kImplies:
      return operand(phi.children[0], 3, false) + " -> " + operand(phi.children[1], 2, true);
    case K::kIff:
      return operand(phi.children[0], 2, false) + " <-> " + operand(phi.children[1], 2, true);
    case K::kExists:
    case K::kForall: {
      const FoFormula& body = phi.children[0];
      const int inner = level(body);
      std::string text = emit(body);
      if (inner >= 1 && inner <= 4) text = "(" + text + ")";
      return std::string(phi.kind == K::kExists ? "E " : "A ") + phi.var + " " + text;
    }
  }
  return "";
}

}  // namespace

std::string to_string(const FoFormula& phi) { return emit(phi); }

std::string to_string(const EsoSentence& chi) {
  std::string out;
  for (const auto& decl : chi.prefix) {
    out += "E" + decl.name + "/" + std::to_string(decl.arity) + " ";
  }
  return out + to_string(chi.matrix);
}

// ---------------------------------------------------------------------------
// Translation

namespace {

Term rename(const Term& t, const std::map<std::string, std::string>& names) {
  if (t.is_variable()) return Term::var(names.at(t.name));
  Term out = Term::apply(t.name);
  for (const auto& a : t.args) out.args.push_back(rename(a, names));
  return out;
}

void collect_symbols(const Formula& phi, std::set<std::string>& out) {
  if (!phi.symbol.empty()) out.insert(phi.symbol);
  for (const auto& child : phi.children) collect_symbols(child, out);
}

/// A relation passed down the formula: its name, one FO variable name per
/// column, and the column holding each live formula variable.
struct Slot {
  std::string pred;
  std::vector<std::string> cols;
  std::map<std::string, std::size_t> live;
};

class Translator {
 public:
  explicit Translator(std::set<std::string> taken) : taken_(std::move(taken)) {}

  std::string fresh_relation() {
    for (;;) {
      std::string name = "R" + std::to_string(next_++);
      if (taken_.insert(name).second) return name;
    }
  }

  std::string fresh_team_predicate() {
    std::string name = "R";
    while (!taken_.insert(name).second) name += "'";
    return name;
  }

  FoFormula run(const Formula& phi, const Slot& slot) {
    using F = FoFormula;
    switch (phi.op) {
      case Op::kEq:
      case Op::kNeq:
      case Op::kRel:
      case Op::kNegRel: return literal(phi, slot);
      case Op::kDep: {
        const auto c = slot.cols;
        const auto d = copies(c);
        std::vector<F> premise = {F::rel_var(slot.pred, c), F::rel_var(slot.pred, d)};
        std::vector<F> conclusion;
        for (const auto& x : phi.xs) premise.push_back(same(slot, x, c, x, d));
        for (const auto& y : phi.ys) conclusion.push_back(same(slot, y, c, y, d));
        return F::forall(concat(c, d), F::implies(F::conj(premise), F::conj(conclusion)));
      }
      case Op::kInc: {
        const auto c = slot.cols;
        const auto d = copies(c);
        std::vector<F> body = {F::rel_var(slot.pred, d)};
        for (std::size_t k = 0; k < phi.xs.size(); ++k) {
          body.push_back(same(slot, phi.xs[k], c, phi.ys[k], d));
        }
        return F::forall(c, F::implies(F::rel_var(slot.pred, c), F::exists(d, F::conj(body))));
      }
      case Op::kExcl: {
        const auto c = slot.cols;
        const auto d = copies(c);
        std::vector<F> equal;
        for (std::size_t k = 0; k < phi.xs.size(); ++k) {
          equal.push_back(same(slot, phi.xs[k], c, phi.ys[k], d));
        }
        return F::forall(concat(c, d),
                         F::implies(F::conj({F::rel_var(slot.pred, c), F::rel_var(slot.pred, d)}),
                                    F::negate(F::conj(equal))));
      }
      case Op::kIndep: {
        const auto c = slot.cols;
        const auto d = copies(c);
        const auto e = copies(concat(c, d), c.size());
        std::vector<F> premise = {F::rel_var(slot.pred, c), F::rel_var(slot.pred, d)};
        for (const auto& z : phi.zs) premise.push_back(same(slot, z, c, z, d));
        std::vector<F> witness = {F::rel_var(slot.pred, e)};
        for (const auto& x : phi.xs) witness.push_back(same(slot, x, e, x, c));
        for (const auto& z : phi.zs) witness.push_back(same(slot, z, e, z, c));
        for (const auto& y : phi.ys) witness.push_back(same(slot, y, e, y, d));
        return F::forall(concat(c, d),
                         F::implies(F::conj(premise), F::exists(e, F::conj(witness))));
      }
      case Op::kAnd: return F::conj({run(phi.left(), slot), run(phi.right(), slot)});
      case Op::kOr: {
        Slot left = slot;
        Slot right = slot;
        left.pred = declare(slot.cols.size());
        right.pred = declare(slot.cols.size());
        const auto& c = slot.cols;
        return F::conj({
            F::forall(c, F::implies(F::rel_var(slot.pred, c),
                                    F::disj({F::rel_var(left.pred, c), F::rel_var(right.pred, c)}))),
            F::forall(c, F::implies(F::rel_var(left.pred, c), F::rel_var(slot.pred, c))),
            F::forall(c, F::implies(F::rel_var(right.pred, c), F::rel_var(slot.pred, c))),
            run(phi.left(), left),
            run(phi.right(), right),
        });
      }
      case Op::kExists:
      case Op::kForall: {
        Slot inner = slot;
        inner.pred = declare(slot.cols.size() + 1);
        std::string col = phi.var;
        while (std::find(slot.cols.begin(), slot.cols.end(), col) != slot.cols.end()) col += "'";
        inner.cols.push_back(col);
        inner.live[phi.var] = slot.cols.size();
        const auto& c = slot.cols;
        const auto wide = inner.cols;
        std::vector<F> parts;
        if (phi.op == Op::kExists) {
          parts.push_back(F::forall(
              c, F::implies(F::rel_var(slot.pred, c), F::exists(col, F::rel_var(inner.pred, wide)))));
          parts.push_back(
              F::forall(wide, F::implies(F::rel_var(inner.pred, wide), F::rel_var(slot.pred, c))));
        } else {
          parts.push_back(
              F::forall(wide, F::iff(F::rel_var(inner.pred, wide), F::rel_var(slot.pred, c))));
        }
        parts.push_back(run(phi.body(), inner));
        return F::conj(std::move(parts));
      }
      default:
        throw Error(ErrorKind::kFragment,
                    "unsupported construct for the ESO translation in: " + format(phi));
    }
  }

  std::vector<SymbolDecl> prefix;

 private:
  std::string declare(std::size_t arity) {
    std::string name = fresh_relation();
    prefix.push_back({name, arity});
    return name;
  }

  FoFormula literal(const Formula& phi, const Slot& slot) {
    std::map<std::string, std::string> names;
    for (const auto& [var, col] : slot.live) names[var] = slot.cols[col];
    std::vector<Term> terms;
    for (const auto& t : phi.terms) terms.push_back(rename(t, names));
    FoFormula alpha = (phi.op == Op::kEq || phi.op == Op::kNeq)
                          ? FoFormula::eq(terms[0], terms[1])
                          : FoFormula::rel(phi.symbol, terms);
    if (phi.op == Op::kNeq || phi.op == Op::kNegRel) alpha = FoFormula::negate(std::move(alpha));
    return FoFormula::forall(slot.cols,
                             FoFormula::implies(FoFormula::rel_var(slot.pred, slot.cols), alpha));
  }

  /// Column names primed until they avoid `avoid` and each other; the first
  /// `keep` entries of `avoid` are the ones being copied when given.
  static std::vector<std::string> copies(const std::vector<std::string>& avoid,
                                         std::size_t keep = SIZE_MAX) {
    std::set<std::string> used(avoid.begin(), avoid.end());
    std::vector<std::string> out;
    const std::size_t count = std::min(keep, avoid.size());
    for (std::size_t j = 0; j < count; ++j) {
      std::string name = avoid[j] + "'";
      while (!used.insert(name).second) name += "'";
      out.push_back(name);
    }
    return out;
  }

  static std::vector<std::string> concat(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
    auto out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  /// a read through the names of one copy equals b read through another.
  static FoFormula same(const Slot& slot, const std::string& a, const std::vector<std::string>& ca,
                        const std::string& b, const std::vector<std::string>& cb) {
    return FoFormula::eq(Term::var(ca.at(slot.live.at(a))), Term::var(cb.at(slot.live.at(b))));
  }

  std::set<std::string> taken_;
  std::size_t next_ = 1;
};

}  // namespace

EsoSentence translate(const Formula& phi, const std::vector<std::string>& team_vars) {
  std::set<std::string> distinct(team_vars.begin(), team_vars.end());
  if (distinct.size() != team_vars.size()) {
    throw Error(ErrorKind::kValidation, "team variables must be distinct");
  }
  for (const auto& v : free_vars(phi)) {
    if (!distinct.count(v)) {
      throw Error(ErrorKind::kUnbound, "free variable '" + v + "' is not a team variable");
    }
  }
  std::set<std::string> symbols;
  collect_symbols(phi, symbols);
  Translator tr(symbols);
  EsoSentence out;
  out.team_predicate = tr.fresh_team_predicate();
  out.team_vars = team_vars;
  Slot root;
  root.pred = out.team_predicate;
  root.cols = team_vars;
  for (std::size_t j = 0; j < team_vars.size(); ++j) root.live[team_vars[j]] = j;
  out.matrix = tr.run(phi, root);
  out.prefix = std::move(tr.prefix);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

using Truth = std::int8_t;
constexpr Truth kFalseV = 0;
constexpr Truth kTrueV = 1;
constexpr Truth kUnknown = 2;

struct CTerm {
  int slot = -1;
  std::size_t function = 0;
  std::vector<CTerm> args;
};

struct CNode {
  FoFormula::Kind kind;
  std::vector<std::size_t> kids;
  std::vector<CTerm> terms;
  std::size_t relation = 0;
  int slot = -1;
};

/// A sentence compiled against a structure and a set of relation variables
/// whose tables hold three-valued cells.
class Compiled {
 public:
  Compiled(const Structure& m, const FoFormula& phi,
           const std::map<std::string, std::size_t, std::less<>>& arities)
      : m_(m) {
    for (const auto& [name, arity] : arities) {
      ids_[name] = names_.size();
      names_.push_back(name);
      arities_.push_back(arity);
      tables_.emplace_back(m.table_size(arity), kUnknown);
    }
    std::vector<std::pair<std::string, int>> scope;
    root_ = compile(phi, scope);
  }

  std::vector<Truth>& table(const std::string& name) { return tables_.at(ids_.at(name)); }
  std::size_t arity(const std::string& name) const { return arities_.at(ids_.at(name)); }

  Truth value() {
    std::vector<Element> env(slots_);
    return eval(root_, env);
  }

 private:
  CTerm compile_term(const Term& t, const std::vector<std::pair<std::string, int>>& scope) {
    CTerm out;
    if (t.is_variable()) {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
        if (it->first == t.name) {
          out.slot = it->second;
          return out;
        }
      }
      throw Error(ErrorKind::kUnbound, "free individual variable '" + t.name + "'");
    }
    const auto index = m_.signature().function_index(t.name);
    if (!index) throw Error(ErrorKind::kSymbol, "unknown function symbol '" + t.name + "'");
    if (m_.signature().functions()[*index].arity != t.args.size()) {
      throw Error(ErrorKind::kArity, "arity mismatch for '" + t.name + "'");
    }
    out.function = *index;
    for (const auto& a : t.args) out.args.push_back(compile_term(a, scope));
    return out;
  }

  std::size_t compile(const FoFormula& phi, std::vector<std::pair<std::string, int>>& scope) {
    using K = FoFormula::Kind;
    CNode node{phi.kind, {}, {}, 0, -1};
    for (const auto& t : phi.terms) node.terms.push_back(compile_term(t, scope));
    if (phi.kind == K::kRel) {
      const auto index = m_.signature().relation_index(phi.name);
      if (!index) throw Error(ErrorKind::kSymbol, "unknown relation symbol '" + phi.name + "'");
      if (m_.signature().relations()[*index].arity != phi.terms.size()) {
        throw Error(ErrorKind::kArity, "arity mismatch for '" + phi.name + "'");
      }
      node.relation = *index;
    } else if (phi.kind == K::kRelVar) {
      const auto it = ids_.find(phi.name);
      if (it == ids_.end()) {
        throw Error(ErrorKind::kUnbound, "unbound relation variable '" + phi.name + "'");
      }
      if (arities_[it->second] != phi.terms.size()) {
        throw Error(ErrorKind::kArity, "arity mismatch for relation variable '" + phi.name + "'");
      }
      node.relation = it->second;
    } else if (phi.kind == K::kExists || phi.kind == K::kForall) {
      node.slot = static_cast<int>(slots_++);
      scope.emplace_back(phi.var, node.slot);
      node.kids.push_back(compile(phi.children[0], scope));
      scope.pop_back();
    }
    if (phi.kind != K::kExists && phi.kind != K::kForall) {
      for (const auto& c : phi.children) node.kids.push_back(compile(c, scope));
    }
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  Element term(const CTerm& t, const std::vector<Element>& env) const {
    if (t.slot >= 0) return env[static_cast<std::size_t>(t.slot)];
    Tuple args;
    for (const auto& a : t.args) args.push_back(term(a, env));
    return m_.apply(t.function, args);
  }

  Truth eval(std::size_t id, std::vector<Element>& env) const {
    using K = FoFormula::Kind;
    const CNode& node = nodes_[id];
    switch (node.kind) {
      case K::kTrue: return kTrueV;
      case K::kFalse: return kFalseV;
      case K::kEq: return term(node.terms[0], env) == term(node.terms[1], env) ? kTrueV : kFalseV;
      case K::kRel:
      case K::kRelVar: {
        Tuple args;
        for (const auto& t : node.terms) args.push_back(term(t, env));
        if (node.kind == K::kRel) return m_.holds(node.relation, args) ? kTrueV : kFalseV;
        return tables_[node.relation][m_.tuple_index(args)];
      }
      case K::kNot: {
        const Truth v = eval(node.kids[0], env);
        return v == kUnknown ? kUnknown : static_cast<Truth>(1 - v);
      }
      case K::kAnd:
      case K::kOr: {
        const Truth stop = node.kind == K::kAnd ? kFalseV : kTrueV;
        Truth out = static_cast<Truth>(1 - stop);
        for (auto kid : node.kids) {
          const Truth v = eval(kid, env);
          if (v == stop) return stop;
          if (v == kUnknown) out = kUnknown;
        }
        return out;
      }
      case K::kImplies: {
        const Truth a = eval(node.kids[0], env);
        if (a == kFalseV) return kTrueV;
        const Truth b = eval(node.kids[1], env);
        if (b == kTrueV) return kTrueV;
        return (a == kTrueV && b == kFalseV) ? kFalseV : kUnknown;
      }
      case K::kIff: {
        const Truth a = eval(node.kids[0], env);
        if (a == kUnknown) return kUnknown;
        const Truth b = eval(node.kids[1], env);
        if (b == kUnknown) return kUnknown;
        return a == b ? kTrueV : kFalseV;
      }
      case K::kExists:
      case K::kForall: {
        const Truth stop = node.kind == K::kExists ? kTrueV : kFalseV;
        Truth out = static_cast<Truth>(1 - stop);
        auto& slot = env[static_cast<std::size_t>(node.slot)];
        for (Element a = 0; a < m_.size(); ++a) {
          slot = a;
          const Truth v = eval(node.kids[0], env);
          if (v == stop) return stop;
          if (v == kUnknown) out = kUnknown;
        }
        return out;
      }
    }
    return kUnknown;
  }

  const Structure& m_;
  std::map<std::string, std::size_t, std::less<>> ids_;
  std::vector<std::string> names_;
  std::vector<std::size_t> arities_;
  std::vector<std::vector<Truth>> tables_;
  std::vector<CNode> nodes_;
  std::size_t root_ = 0;
  std::size_t slots_ = 0;
};

void collect_relation_vars(const FoFormula& phi, std::map<std::string, std::size_t, std::less<>>& out) {
  if (phi.kind == FoFormula::Kind::kRelVar) {
    const auto [it, inserted] = out.emplace(phi.name, phi.terms.size());
    if (!inserted && it->second != phi.terms.size()) {
      throw Error(ErrorKind::kArity, "relation variable '" + phi.name + "' used with two arities");
    }
  }
  for (const auto& c : phi.children) collect_relation_vars(c, out);
}

void fill(std::vector<Truth>& table, const Structure& m, const Relation& r) {
  std::fill(table.begin(), table.end(), kFalseV);
  for (const auto& t : r.tuples()) {
    for (auto a : t) {
      if (a >= m.size()) throw Error(ErrorKind::kValidation, "relation value outside the domain");
    }
    table[m.tuple_index(t)] = kTrueV;
  }
}

}  // namespace

bool eval_fo(const Structure& structure, const FoFormula& sentence, const RelationEnv& env) {
  std::map<std::string, std::size_t, std::less<>> used;
  collect_relation_vars(sentence, used);
  for (auto& [name, arity] : used) {
    const auto it = env.find(name);
    if (it == env.end()) throw Error(ErrorKind::kUnbound, "unbound relation variable '" + name + "'");
    if (it->second.arity() != arity && !it->second.empty()) {
      throw Error(ErrorKind::kArity, "arity mismatch for relation variable '" + name + "'");
    }
  }
  Compiled c(structure, sentence, used);
  for (const auto& [name, arity] : used) fill(c.table(name), structure, env.find(name)->second);
  return c.value() == kTrueV;
}

bool eval_eso(const Structure& structure, const EsoSentence& chi, const Relation& team_relation,
              const EsoOptions& options, EsoStats* stats) {
  std::map<std::string, std::size_t, std::less<>> arities;
  arities[chi.team_predicate] = chi.team_vars.size();
  for (const auto& decl : chi.prefix) {
    if (!arities.emplace(decl.name, decl.arity).second) {
      throw Error(ErrorKind::kValidation, "relation variable '" + decl.name + "' declared twice");
    }
    std::size_t cells = 1;
    for (std::size_t k = 0; k < decl.arity; ++k) {
      cells *= structure.size();
      if (cells > options.max_cells) {
        throw BudgetExceeded("relation variable " + decl.name + "/" + std::to_string(decl.arity) +
                             " needs more than " + std::to_string(options.max_cells) + " cells");
      }
    }
  }
  std::map<std::string, std::size_t, std::less<>> used;
  collect_relation_vars(chi.matrix, used);
  for (const auto& [name, arity] : used) {
    const auto it = arities.find(name);
    if (it == arities.end()) throw Error(ErrorKind::kUnbound, "unbound relation variable '" + name + "'");
    if (it->second != arity) {
      throw Error(ErrorKind::kArity, "arity mismatch for relation variable '" + name + "'");
    }
  }
  if (team_relation.arity() != chi.team_vars.size() && !team_relation.empty()) {
    throw Error(ErrorKind::kArity, "team relation has the wrong arity");
  }
  Compiled c(structure, chi.matrix, arities);
  fill(c.table(chi.team_predicate), structure, team_relation);

  // Cells in search order: prefix variables in order, each from its most
  // significant cell down, 0 before 1.
  std::vector<std::pair<std::vector<Truth>*, std::size_t>> cells;
  for (const auto& decl : chi.prefix) {
    auto& table = c.table(decl.name);
    for (std::size_t idx = table.size(); idx-- > 0;) cells.emplace_back(&table, idx);
  }
  std::uint64_t nodes = 0;
  auto dfs = [&](auto&& self, std::size_t pos) -> bool {
    if (++nodes > options.max_nodes) throw BudgetExceeded("ESO search node budget exhausted");
    const Truth v = c.value();
    if (v != kUnknown) return v == kTrueV;
    if (pos == cells.size()) return false;
    auto& cell = (*cells[pos].first)[cells[pos].second];
    for (Truth bit : {kFalseV, kTrueV}) {
      cell = bit;
      if (self(self, pos + 1)) return true;
    }
    cell = kUnknown;
    return false;
  };
  const bool out = dfs(dfs, 0);
  if (stats != nullptr) stats->nodes += nodes;
  return out;
}

Crosscheck crosscheck(const Structure& structure, const Team& team, const Formula& phi,
                      std::vector<std::string> team_vars, const EsoOptions& options) {
  if (team_vars.empty()) team_vars = team.vars();
  Crosscheck out;
  const auto chi = translate(phi, team_vars);
  out.direct = eval(structure, team, phi);
  out.via_eso = eval_eso(structure, chi, project(team, team_vars), options);
  return out;
}

}  // namespace teamlog
