#include "teamlog/formula.hpp"

#include <algorithm>
#include <map>

#include "teamlog/errors.hpp"

namespace teamlog {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kEq: return "eq";
    case Op::kNeq: return "neq";
    case Op::kRel: return "rel";
    case Op::kNegRel: return "neg_rel";
    case Op::kDep: return "dep";
    case Op::kInc: return "inc";
    case Op::kIndep: return "indep";
    case Op::kExcl: return "excl";
    case Op::kAnd: return "and";
    case Op::kOr: return "or";
    case Op::kOrStrict: return "or_strict";
    case Op::kIntOr: return "int_or";
    case Op::kImpl: return "impl";
    case Op::kWeakNeg: return "weak_neg";
    case Op::kClassNeg: return "class_neg";
    case Op::kExists: return "exists";
    case Op::kExistsStrict: return "exists_strict";
    case Op::kForall: return "forall";
    case Op::kExists1: return "exists1";
    case Op::kForall1: return "forall1";
  }
  return "?";
}

Formula Formula::eq(Term t, Term u) {
  Formula f;
  f.op = Op::kEq;
  f.terms = {std::move(t), std::move(u)};
  return f;
}

Formula Formula::neq(Term t, Term u) {
  Formula f = eq(std::move(t), std::move(u));
  f.op = Op::kNeq;
  return f;
}

Formula Formula::rel(std::string symbol, std::vector<Term> args) {
  Formula f;
  f.op = Op::kRel;
  f.symbol = std::move(symbol);
  f.terms = std::move(args);
  return f;
}

Formula Formula::neg_rel(std::string symbol, std::vector<Term> args) {
  Formula f = rel(std::move(symbol), std::move(args));
  f.op = Op::kNegRel;
  return f;
}

Formula Formula::dep(std::vector<std::string> xs, std::string y) {
  Formula f;
  f.op = Op::kDep;
  f.xs = std::move(xs);
  f.ys = {std::move(y)};
  return f;
}

Formula Formula::inc(std::vector<std::string> xs, std::vector<std::string> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::kArity, "inclusion atom needs tuples of equal length");
  }
  Formula f;
  f.op = Op::kInc;
  f.xs = std::move(xs);
  f.ys = std::move(ys);
  return f;
}

Formula Formula::indep(std::vector<std::string> xs, std::vector<std::string> ys,
                       std::vector<std::string> zs) {
  Formula f;
  f.op = Op::kIndep;
  f.xs = std::move(xs);
  f.ys = std::move(ys);
  f.zs = std::move(zs);
  return f;
}

Formula Formula::excl(std::vector<std::string> xs, std::vector<std::string> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::kArity, "exclusion atom needs tuples of equal length");
  }
  Formula f;
  f.op = Op::kExcl;
  f.xs = std::move(xs);
  f.ys = std::move(ys);
  return f;
}

Formula Formula::binary(Op op, Formula left, Formula right) {
  Formula f;
  f.op = op;
  f.children = {std::move(left), std::move(right)};
  if (!f.is_binary()) throw Error(ErrorKind::kShape, "not a binary connective");
  return f;
}

Formula Formula::unary(Op op, Formula body) {
  Formula f;
  f.op = op;
  f.children = {std::move(body)};
  if (!f.is_negation()) throw Error(ErrorKind::kShape, "not a negation");
  return f;
}

Formula Formula::quantifier(Op op, std::string var, Formula body) {
  Formula f;
  f.op = op;
  f.var = std::move(var);
  f.children = {std::move(body)};
  if (!f.is_quantifier()) throw Error(ErrorKind::kShape, "not a quantifier");
  return f;
}

bool Formula::is_literal() const noexcept {
  return op == Op::kEq || op == Op::kNeq || op == Op::kRel || op == Op::kNegRel;
}

bool Formula::is_atom() const noexcept {
  return op == Op::kDep || op == Op::kInc || op == Op::kIndep || op == Op::kExcl;
}

bool Formula::is_binary() const noexcept {
  return op == Op::kAnd || op == Op::kOr || op == Op::kOrStrict || op == Op::kIntOr ||
         op == Op::kImpl;
}

bool Formula::is_negation() const noexcept {
  return op == Op::kWeakNeg || op == Op::kClassNeg;
}

bool Formula::is_quantifier() const noexcept {
  return op == Op::kExists || op == Op::kExistsStrict || op == Op::kForall ||
         op == Op::kExists1 || op == Op::kForall1;
}

bool FragmentLabel::in_fo_c() const noexcept {
  return !int_or && !impl && !weak_neg && !class_neg && !exists1 && !forall1;
}

std::vector<std::string> FragmentLabel::names() const {
  std::vector<std::string> out;
  const std::pair<bool, const char*> items[] = {
      {dep, "dep"},           {indep, "indep"},       {inc, "inc"},
      {excl, "excl"},         {lax_or, "or"},         {strict_or, "or_strict"},
      {lax_exists, "exists"}, {strict_exists, "exists_strict"},
      {forall, "forall"},     {int_or, "int_or"},     {impl, "impl"},
      {weak_neg, "weak_neg"}, {class_neg, "class_neg"},
      {exists1, "exists1"},   {forall1, "forall1"},
  };
  for (const auto& [on, name] : items) {
    if (on) out.emplace_back(name);
  }
  return out;
}

namespace {

void label(const Formula& phi, FragmentLabel& out) {
  switch (phi.op) {
    case Op::kDep: out.dep = true; break;
    case Op::kIndep: out.indep = true; break;
    case Op::kInc: out.inc = true; break;
    case Op::kExcl: out.excl = true; break;
    case Op::kOr: out.lax_or = true; break;
    case Op::kOrStrict: out.strict_or = true; break;
    case Op::kExists: out.lax_exists = true; break;
    case Op::kExistsStrict: out.strict_exists = true; break;
    case Op::kForall: out.forall = true; break;
    case Op::kIntOr: out.int_or = true; break;
    case Op::kImpl: out.impl = true; break;
    case Op::kWeakNeg: out.weak_neg = true; break;
    case Op::kClassNeg: out.class_neg = true; break;
    case Op::kExists1: out.exists1 = true; break;
    case Op::kForall1: out.forall1 = true; break;
    default: break;
  }
  for (const auto& child : phi.children) label(child, out);
}

bool all_children(const Formula& phi, bool (*pred)(const Formula&)) {
  return std::all_of(phi.children.begin(), phi.children.end(), pred);
}

void collect_free(const Formula& phi, std::set<std::string>& out) {
  if (phi.is_literal()) {
    for (const auto& t : phi.terms) collect_vars(t, out);
    return;
  }
  if (phi.is_atom()) {
    out.insert(phi.xs.begin(), phi.xs.end());
    out.insert(phi.ys.begin(), phi.ys.end());
    out.insert(phi.zs.begin(), phi.zs.end());
    return;
  }
  if (phi.is_quantifier()) {
    auto inner = free_vars(phi.body());
    inner.erase(phi.var);
    out.insert(inner.begin(), inner.end());
    return;
  }
  for (const auto& child : phi.children) collect_free(child, out);
}

bool atom_mentions(const Formula& phi, const std::string& x) {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  return has(phi.xs) || has(phi.ys) || has(phi.zs);
}

void note_symbol(std::map<std::string, std::pair<bool, std::size_t>>& seen,
                 std::vector<SymbolDecl>& relations, std::vector<SymbolDecl>& functions,
                 const std::string& name, bool is_relation, std::size_t arity) {
  auto [it, inserted] = seen.emplace(name, std::make_pair(is_relation, arity));
  if (inserted) {
    (is_relation ? relations : functions).push_back({name, arity});
    return;
  }
  if (it->second.first != is_relation || it->second.second != arity) {
    throw Error(ErrorKind::kArity, "symbol '" + name + "' used inconsistently");
  }
}

void note_term(std::map<std::string, std::pair<bool, std::size_t>>& seen,
               std::vector<SymbolDecl>& relations, std::vector<SymbolDecl>& functions,
               const Term& t) {
  if (t.is_variable()) return;
  note_symbol(seen, relations, functions, t.name, false, t.args.size());
  for (const auto& arg : t.args) note_term(seen, relations, functions, arg);
}

void note_formula(std::map<std::string, std::pair<bool, std::size_t>>& seen,
                  std::vector<SymbolDecl>& relations, std::vector<SymbolDecl>& functions,
                  const Formula& phi) {
  if (phi.op == Op::kRel || phi.op == Op::kNegRel) {
    note_symbol(seen, relations, functions, phi.symbol, true, phi.terms.size());
  }
  for (const auto& t : phi.terms) note_term(seen, relations, functions, t);
  for (const auto& child : phi.children) note_formula(seen, relations, functions, child);
}

void check_term(const Term& t, const Signature& signature) {
  if (t.is_variable()) return;
  auto fn = signature.function_index(t.name);
  if (!fn) throw Error(ErrorKind::kSymbol, "unknown function symbol '" + t.name + "'");
  const auto arity = signature.functions()[*fn].arity;
  if (arity != t.args.size()) {
    throw Error(ErrorKind::kArity, "function '" + t.name + "' expects " +
                                       std::to_string(arity) + " arguments, got " +
                                       std::to_string(t.args.size()));
  }
  for (const auto& arg : t.args) check_term(arg, signature);
}

std::size_t next_fresh_index(const std::vector<Term>& terms) {
  std::set<std::string> vars;
  for (const auto& t : terms) collect_vars(t, vars);
  std::size_t next = 0;
  for (const auto& v : vars) {
    if (v.size() > 2 && v.compare(0, 2, "$u") == 0 &&
        v.find_first_not_of("0123456789", 2) == std::string::npos) {
      next = std::max(next, static_cast<std::size_t>(std::stoul(v.substr(2))) + 1);
    }
  }
  return next;
}

}  // namespace

FragmentLabel fragment_of(const Formula& phi) {
  FragmentLabel out;
  label(phi, out);
  return out;
}

bool is_first_order(const Formula& phi) {
  if (phi.is_literal()) return true;
  switch (phi.op) {
    case Op::kAnd:
    case Op::kOr:
    case Op::kOrStrict:
    case Op::kExists:
    case Op::kExistsStrict:
    case Op::kForall:
      return all_children(phi, is_first_order);
    default:
      return false;
  }
}

bool is_downward_closed(const Formula& phi) {
  switch (phi.op) {
    case Op::kEq:
    case Op::kNeq:
    case Op::kRel:
    case Op::kNegRel:
    case Op::kDep:
    case Op::kExcl:
    case Op::kImpl:
      return true;
    case Op::kInc:
    case Op::kIndep:
    case Op::kWeakNeg:
    case Op::kClassNeg:
      return false;
    default:
      return all_children(phi, is_downward_closed);
  }
}

bool is_union_closed(const Formula& phi) {
  switch (phi.op) {
    case Op::kEq:
    case Op::kNeq:
    case Op::kRel:
    case Op::kNegRel:
    case Op::kInc:
      return true;
    case Op::kAnd:
    case Op::kOr:
    case Op::kExists:
    case Op::kForall:
      return all_children(phi, is_union_closed);
    case Op::kOrStrict:
    case Op::kExistsStrict:
      // With downward-closed parts the strict clause coincides with the lax one.
      return all_children(phi, is_union_closed) && all_children(phi, is_downward_closed);
    default:
      return false;
  }
}

std::set<std::string> free_vars(const Formula& phi) {
  std::set<std::string> out;
  collect_free(phi, out);
  return out;
}

std::vector<std::string> free_var_list(const Formula& phi) {
  auto fv = free_vars(phi);
  return {fv.begin(), fv.end()};
}

std::set<std::string> free_vars(const std::vector<Formula>& phis) {
  std::set<std::string> out;
  for (const auto& phi : phis) collect_free(phi, out);
  return out;
}

Formula substitute(const Formula& phi, const Term& t, const std::string& x) {
  if (phi.is_literal()) {
    Formula out = phi;
    for (auto& term : out.terms) term = replace_var(term, x, t);
    return out;
  }
  if (phi.is_atom()) {
    if (atom_mentions(phi, x)) {
      throw Error(ErrorKind::kFragment, "variable '" + x +
                                            "' occurs in a dependency atom; desugar it first");
    }
    return phi;
  }
  if (phi.is_quantifier()) {
    if (phi.var == x) return phi;
    const auto body_free = free_vars(phi.body());
    if (body_free.count(x) != 0 && vars_of(t).count(phi.var) != 0) {
      throw Error(ErrorKind::kCapture,
                  "substituting " + to_string(t) + " for '" + x + "' would be captured by '" +
                      phi.var + "'");
    }
    Formula out = phi;
    out.children[0] = substitute(phi.body(), t, x);
    return out;
  }
  Formula out = phi;
  for (auto& child : out.children) child = substitute(child, t, x);
  return out;
}

Formula desugar_term_atom(AtomKind kind, const std::vector<Term>& left,
                          const std::vector<Term>& right, const std::vector<Term>& condition) {
  if (kind == AtomKind::kDep && right.size() != 1) {
    throw Error(ErrorKind::kArity, "dependence atom takes exactly one dependent term");
  }
  if ((kind == AtomKind::kInc || kind == AtomKind::kExcl) && left.size() != right.size()) {
    throw Error(ErrorKind::kArity, "atom needs tuples of equal length");
  }
  std::vector<Term> all = left;
  all.insert(all.end(), right.begin(), right.end());
  all.insert(all.end(), condition.begin(), condition.end());

  const bool plain =
      std::all_of(all.begin(), all.end(), [](const Term& t) { return t.is_variable(); });
  std::vector<std::string> names;
  if (plain) {
    for (const auto& t : all) names.push_back(t.name);
  } else {
    auto next = next_fresh_index(all);
    for (std::size_t i = 0; i < all.size(); ++i) names.push_back("$u" + std::to_string(next + i));
  }
  auto slice = [&](std::size_t from, std::size_t count) {
    return std::vector<std::string>(names.begin() + static_cast<std::ptrdiff_t>(from),
                                    names.begin() + static_cast<std::ptrdiff_t>(from + count));
  };
  auto xs = slice(0, left.size());
  auto ys = slice(left.size(), right.size());
  auto zs = slice(left.size() + right.size(), condition.size());

  Formula atom;
  switch (kind) {
    case AtomKind::kDep: atom = Formula::dep(xs, ys[0]); break;
    case AtomKind::kInc: atom = Formula::inc(xs, ys); break;
    case AtomKind::kIndep: atom = Formula::indep(xs, ys, zs); break;
    case AtomKind::kExcl: atom = Formula::excl(xs, ys); break;
  }
  if (plain) return atom;

  Formula body = atom;
  for (std::size_t i = 0; i < all.size(); ++i) {
    body = Formula::conj(std::move(body), Formula::eq(Term::var(names[i]), all[i]));
  }
  for (std::size_t i = all.size(); i-- > 0;) body = Formula::exists(names[i], std::move(body));
  return body;
}

Formula strictify(const Formula& phi) {
  Formula out = phi;
  if (out.op == Op::kOr) out.op = Op::kOrStrict;
  if (out.op == Op::kExists) out.op = Op::kExistsStrict;
  for (auto& child : out.children) child = strictify(child);
  return out;
}

Signature infer_signature(const std::vector<Formula>& phis) {
  std::map<std::string, std::pair<bool, std::size_t>> seen;
  std::vector<SymbolDecl> relations;
  std::vector<SymbolDecl> functions;
  for (const auto& phi : phis) note_formula(seen, relations, functions, phi);
  return Signature(std::move(relations), std::move(functions));
}

void check_signature(const Formula& phi, const Signature& signature) {
  if (phi.op == Op::kRel || phi.op == Op::kNegRel) {
    auto rel = signature.relation_index(phi.symbol);
    if (!rel) throw Error(ErrorKind::kSymbol, "unknown relation symbol '" + phi.symbol + "'");
    const auto arity = signature.relations()[*rel].arity;
    if (arity != phi.terms.size()) {
      throw Error(ErrorKind::kArity, "relation '" + phi.symbol + "' expects " +
                                         std::to_string(arity) + " arguments, got " +
                                         std::to_string(phi.terms.size()));
    }
  }
  for (const auto& t : phi.terms) check_term(t, signature);
  for (const auto& child : phi.children) check_signature(child, signature);
}

std::size_t depth(const Formula& phi) {
  std::size_t deepest = 0;
  for (const auto& child : phi.children) deepest = std::max(deepest, depth(child));
  return deepest + 1;
}

std::size_t node_count(const Formula& phi) {
  std::size_t total = 1;
  for (const auto& child : phi.children) total += node_count(child);
  return total;
}

}  // namespace teamlog
