#include "teamlog/corpus.hpp"

#include <algorithm>
#include <set>

#include "teamlog/errors.hpp"
#include "teamlog/parser.hpp"

namespace teamlog {

std::uint64_t pick(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::kPrecondition, "pick from an empty range");
  return rng() % bound;
}

namespace {

bool is_leaf_op(Op op) {
  switch (op) {
    case Op::kEq:
    case Op::kNeq:
    case Op::kRel:
    case Op::kNegRel:
    case Op::kDep:
    case Op::kInc:
    case Op::kIndep:
    case Op::kExcl:
      return true;
    default:
      return false;
  }
}

bool is_quantifier_op(Op op) {
  return op == Op::kExists || op == Op::kExistsStrict || op == Op::kForall || op == Op::kExists1 ||
         op == Op::kForall1;
}

bool is_unary_op(Op op) { return op == Op::kWeakNeg || op == Op::kClassNeg; }

class Generator {
 public:
  Generator(Rng& rng, const FormulaGen& gen) : rng_(rng), gen_(gen) {
    for (Op op : gen.ops) (is_leaf_op(op) ? leaves_ : inner_).push_back(op);
    if (leaves_.empty()) throw Error(ErrorKind::kPrecondition, "generator has no leaf constructs");
    // Relation literals need a relation symbol.
    if (gen.relations.empty()) {
      std::erase_if(leaves_, [](Op op) { return op == Op::kRel || op == Op::kNegRel; });
      if (leaves_.empty()) throw Error(ErrorKind::kPrecondition, "no relation symbols");
    }
  }

  Formula formula(std::size_t depth_left, std::vector<std::string>& scope) {
    if (depth_left <= 1 || inner_.empty() || pick(rng_, 3) == 0) return leaf(scope);
    const Op op = inner_[pick(rng_, inner_.size())];
    if (is_quantifier_op(op)) {
      const auto& var = gen_.bound_vars[pick(rng_, gen_.bound_vars.size())];
      scope.push_back(var);
      Formula body = formula(depth_left - 1, scope);
      scope.pop_back();
      return Formula::quantifier(op, var, std::move(body));
    }
    if (is_unary_op(op)) return Formula::unary(op, formula(depth_left - 1, scope));
    Formula left = formula(depth_left - 1, scope);
    Formula right = formula(depth_left - 1, scope);
    return Formula::binary(op, std::move(left), std::move(right));
  }

 private:
  std::string var(const std::vector<std::string>& scope) {
    return scope[pick(rng_, scope.size())];
  }

  std::vector<std::string> vars(const std::vector<std::string>& scope, std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(var(scope));
    return out;
  }

  Term term(const std::vector<std::string>& scope, bool allow_apply) {
    if (allow_apply && !gen_.functions.empty() && pick(rng_, 4) == 0) {
      const auto& fn = gen_.functions[pick(rng_, gen_.functions.size())];
      std::vector<Term> args;
      for (std::size_t i = 0; i < fn.arity; ++i) args.push_back(term(scope, false));
      return Term::apply(fn.name, std::move(args));
    }
    return Term::var(var(scope));
  }

  Formula leaf(const std::vector<std::string>& scope) {
    const Op op = leaves_[pick(rng_, leaves_.size())];
    const std::size_t width = gen_.max_atom_width;
    switch (op) {
      case Op::kEq:
        return Formula::eq(term(scope, true), term(scope, true));
      case Op::kNeq:
        return Formula::neq(term(scope, true), term(scope, true));
      case Op::kRel:
      case Op::kNegRel: {
        const auto& rel = gen_.relations[pick(rng_, gen_.relations.size())];
        std::vector<Term> args;
        for (std::size_t i = 0; i < rel.arity; ++i) args.push_back(term(scope, true));
        return op == Op::kRel ? Formula::rel(rel.name, std::move(args))
                              : Formula::neg_rel(rel.name, std::move(args));
      }
      case Op::kDep:
        return Formula::dep(vars(scope, pick(rng_, width + 1)), var(scope));
      case Op::kInc:
      case Op::kExcl: {
        const std::size_t k = 1 + pick(rng_, width);
        auto xs = vars(scope, k);
        auto ys = vars(scope, k);
        return op == Op::kInc ? Formula::inc(std::move(xs), std::move(ys))
                              : Formula::excl(std::move(xs), std::move(ys));
      }
      case Op::kIndep: {
        auto xs = vars(scope, 1 + pick(rng_, width));
        auto ys = vars(scope, 1);
        auto zs = vars(scope, pick(rng_, 2));
        return Formula::indep(std::move(xs), std::move(ys), std::move(zs));
      }
      default:
        throw Error(ErrorKind::kPrecondition, "not a leaf construct");
    }
  }

  Rng& rng_;
  const FormulaGen& gen_;
  std::vector<Op> leaves_;
  std::vector<Op> inner_;
};

std::vector<Formula> parse_all(const std::vector<const char*>& texts) {
  std::vector<Formula> out;
  for (const char* text : texts) out.push_back(parse(text));
  return out;
}

void append_unique(std::vector<Formula>& out, const std::vector<Formula>& more) {
  for (const auto& phi : more) {
    if (std::find(out.begin(), out.end(), phi) == out.end()) out.push_back(phi);
  }
}

}  // namespace

Formula random_formula(Rng& rng, const FormulaGen& gen) {
  if (gen.free_vars.empty() && gen.bound_vars.empty()) {
    throw Error(ErrorKind::kPrecondition, "generator has no variables");
  }
  Generator g(rng, gen);
  std::vector<std::string> scope = gen.free_vars;
  if (scope.empty()) {
    // Sentences start with a quantifier so that every leaf has a variable.
    const auto& var = gen.bound_vars[pick(rng, gen.bound_vars.size())];
    scope.push_back(var);
    Formula body = g.formula(gen.max_depth > 1 ? gen.max_depth - 1 : 1, scope);
    return Formula::quantifier(pick(rng, 2) == 0 ? Op::kExists : Op::kForall, var, std::move(body));
  }
  return g.formula(gen.max_depth, scope);
}

Structure random_structure(Rng& rng, const Signature& signature, std::size_t n) {
  Structure m(signature, n);
  for (std::size_t r = 0; r < signature.relations().size(); ++r) {
    for (auto& cell : m.mutable_relation_table(r)) cell = static_cast<std::uint8_t>(pick(rng, 2));
  }
  for (std::size_t f = 0; f < signature.functions().size(); ++f) {
    for (auto& cell : m.mutable_function_table(f)) cell = static_cast<Element>(pick(rng, n));
  }
  return m;
}

Team random_team(Rng& rng, const std::vector<std::string>& vars, std::size_t n,
                 std::size_t max_rows) {
  const Team full = full_team(vars, n);
  std::vector<std::size_t> order(full.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[pick(rng, i)]);
  const std::size_t rows = pick(rng, std::min(max_rows, full.size()) + 1);
  std::vector<Tuple> chosen;
  for (std::size_t i = 0; i < rows; ++i) chosen.push_back(full.rows()[order[i]]);
  return Team(vars, std::move(chosen));
}

Signature corpus_signature() { return Signature({{"P", 1}, {"Q", 1}}, {}); }

std::vector<Formula> fo_corpus() {
  auto out = parse_all({
      "x = x",
      "x != y",
      "P(x)",
      "!P(x) & Q(y)",
      "P(x) v Q(x)",
      "P(x) v !P(x)",
      "E z (P(z) & z != x)",
      "A z (P(z) v Q(z))",
      "E z (z = x)",
      "A z (z = x v z != y)",
      "E y E z (y != z)",
      "P(x) & (Q(y) v x = y)",
      "A z E w (w != z)",
      "E z (P(z) & Q(z)) v P(y)",
      "(x = y & P(x)) v (x != y & !Q(y))",
      "A z (!P(z) v Q(z))",
      "E z A w (w = z v P(w))",
      "!Q(x) v E z (Q(z) & z != x)",
      "A z (z = x)",
      "E z (!P(z) & !Q(z) & z = y)",
  });
  Rng rng(20240917);
  FormulaGen gen;
  gen.max_depth = 4;
  while (out.size() < 50) {
    Formula phi = random_formula(rng, gen);
    if (depth(phi) >= 2 && std::find(out.begin(), out.end(), phi) == out.end()) {
      out.push_back(std::move(phi));
    }
  }
  return out;
}

std::vector<Formula> downward_corpus() {
  return parse_all({
      "dep(x ; y)",
      "dep( ; x)",
      "excl(x ; y)",
      "dep(x ; y) & P(x)",
      "dep( ; x) v dep( ; x)",
      "dep( ; y) v P(y)",
      "E z (dep(x ; z) & excl(z ; y))",
      "A z (dep(x, z ; y))",
      "E z (dep( ; z) & z != x)",
      "dep(x ; y) v excl(x ; y)",
      "A z (dep(z ; x) v P(z))",
      "excl(x ; y) & dep( ; y)",
      "E z (excl(z ; x) & dep(y ; z))",
      "P(x) v dep( ; x)",
      "dep(y ; x) & (Q(x) v dep( ; x))",
      "A z E w (dep(z ; w) & w != z)",
      "E z (dep(z ; x))",
      "excl(x ; x)",
      "dep( ; x) & dep( ; y)",
      "E z (dep(x ; z) & dep(y ; z) & excl(z ; x))",
      "(dep( ; x) v dep( ; x)) v dep( ; x)",
      "A z (excl(z ; x) v dep( ; z))",
      "dep(x ; y) & dep(y ; x)",
      "E z (Q(z) & excl(x ; z))",
      "!P(x) v (dep( ; y) & Q(y))",
      "A z (z = x v dep( ; y))",
      "E z E w (dep(z ; w) & excl(w ; x))",
      "excl(x ; y) v excl(y ; x)",
      "dep(x, y ; x)",
      "E z (dep(y ; z) & (P(z) v dep(x ; z)))",
  });
}

std::vector<Formula> union_corpus() {
  return parse_all({
      "inc(x ; y)",
      "inc(y ; x)",
      "A z (inc(z ; x))",
      "E z (inc(z ; x) & P(z))",
      "P(x) v inc(y ; x)",
      "inc(x, y ; y, x)",
      "E z (inc(x ; z) & z != x)",
      "A z (inc(z ; x) v inc(z ; y))",
      "inc(x ; y) & Q(x)",
      "E z (inc(z ; x))",
      "inc(x ; y) v inc(y ; x)",
      "A z E w (inc(w ; x) & w != z)",
      "E z (inc(z ; y) & inc(x ; z))",
      "!P(x) v inc(x ; y)",
      "inc(x ; x)",
      "A z (P(z) v inc(z ; y))",
      "E z (Q(z) & inc(z ; y) & z != y)",
      "inc(x, x ; y, y)",
      "inc(x ; y) & inc(y ; x)",
      "E z E w (inc(z, w ; x, y) & z != w)",
      "P(y) v (Q(y) & inc(y ; x))",
      "A z (z = x v inc(z ; y))",
      "E z (inc(z ; x) & A w (w = z v inc(w ; y)))",
      "inc(y ; x) & !Q(x)",
      "E z (inc(x ; z) & inc(z ; y))",
      "A z (inc(x ; z))",
      "inc(x, y ; x, x)",
      "(P(x) & inc(x ; y)) v (Q(x) & inc(y ; x))",
      "E z (P(z) v inc(z ; x))",
      "A z E w (inc(z, w ; x, y))",
  });
}

std::vector<Formula> locality_corpus() {
  return parse_all({
      "dep( ; x)",
      "A y (inc(y ; x))",
      "E y E z (y != z)",
      "E y (indep(x ; y))",
      "E y (indep(x ; y) & y != x)",
      "A y (dep(x ; y) v inc(y ; x))",
      "E y (dep( ; y) & excl(x ; y))",
      "P(x) v dep( ; x)",
      "E y (inc(y ; x) & Q(y))",
      "A y E z (indep(y ; z) & z != y)",
      "dep( ; x) & P(x)",
      "inc(x ; x)",
      "E y (excl(y ; x) & P(y))",
      "A y (y = x v excl(y ; x))",
      "E y (indep(y ; y | x))",
      "dep( ; x) v dep( ; x)",
      "E y (dep(x ; y) & inc(x ; y))",
      "A y E z (dep(y ; z) & z != y)",
      "Q(x) & E y (inc(y ; x))",
      "E y (P(y) & indep(x ; y))",
      "indep(x ; x)",
      "A y (indep(x ; y))",
      "E y (excl(x ; y) v inc(x ; y))",
      "x = x v dep( ; x)",
      "E y (dep( ; y) & inc(x ; y))",
      "A y (P(y) v dep( ; x))",
      "E y E z (indep(y ; z | x) & y != z)",
      "!P(x) v inc(x ; x)",
      "E y A z (z = y v excl(z ; y))",
      "dep( ; x) & E y (y != x & excl(y ; x))",
  });
}

std::vector<Formula> strict_locality_corpus() {
  return parse_all({
      "Es y (A w (inc(w ; y)))",
      "Es y (dep( ; x) & A w (inc(w ; y)))",
  });
}

std::vector<Formula> atom_corpus() {
  std::vector<Formula> out;
  append_unique(out, fo_corpus());
  append_unique(out, downward_corpus());
  append_unique(out, union_corpus());
  append_unique(out, locality_corpus());
  append_unique(out, parse_all({
                         "indep(x ; y)",
                         "indep(x ; y | x)",
                         "E z (indep(x ; z | y))",
                         "A z (indep(x ; z))",
                         "indep(x, y ; x)",
                         "E z (indep(z ; x) & dep(y ; z))",
                         "indep(y ; x) v inc(x ; y)",
                     }));
  return out;
}

}  // namespace teamlog
