#include <doctest.h>

#include "helpers.hpp"
#include "teamlog/corpus.hpp"

using namespace testing;

namespace {

std::vector<Op> all_ops() {
  return {Op::kEq,      Op::kNeq,    Op::kRel,      Op::kNegRel,   Op::kDep,
          Op::kInc,     Op::kIndep,  Op::kExcl,     Op::kAnd,      Op::kOr,
          Op::kOrStrict, Op::kIntOr, Op::kImpl,     Op::kWeakNeg,  Op::kClassNeg,
          Op::kExists,  Op::kExistsStrict, Op::kForall, Op::kExists1, Op::kForall1};
}

}  // namespace

TEST_CASE("free variables") {
  CHECK(free_vars(F("dep(x ; y)")) == std::set<std::string>{"x", "y"});
  CHECK(free_vars(F("A y (inc(y ; x))")) == std::set<std::string>{"x"});
  CHECK(free_vars(F("x = x")) == std::set<std::string>{"x"});
  CHECK(free_vars(F("E y E z (y != z)")).empty());
  CHECK(free_vars(F("E x (P(x)) & Q(x)")).empty());
  CHECK(free_vars(F("(E x (P(x))) & Q(x)")) == std::set<std::string>{"x"});
  CHECK(free_vars(F("indep(x ; y | z)")) == std::set<std::string>{"x", "y", "z"});
}

TEST_CASE("parser shapes") {
  CHECK(F("dep(x ; y)") == Formula::dep({"x"}, "y"));
  CHECK(F("A y (inc(y ; x))") == Formula::forall("y", Formula::inc({"y"}, {"x"})));
  CHECK(F("E y E z (y != z)") ==
        Formula::exists("y", Formula::exists("z", Formula::neq(Term::var("y"), Term::var("z")))));
  CHECK(F("dep(x ; y, z)") ==
        Formula::conj(Formula::dep({"x"}, "y"), Formula::dep({"x"}, "z")));
  CHECK(F("indep(x ; y)") == Formula::indep({"x"}, {"y"}, {}));
  // Precedence: negations, then &, then the disjunctions, then ->.
  CHECK(F("~P(x) & Q(x) v R(x) -> S(x)") ==
        Formula::binary(Op::kImpl,
                        Formula::lax_or(Formula::conj(Formula::unary(Op::kClassNeg, F("P(x)")),
                                                      F("Q(x)")),
                                        F("R(x)")),
                        F("S(x)")));
  CHECK(F("P(x) -> Q(x) -> R(x)") ==
        Formula::binary(Op::kImpl, F("P(x)"), Formula::binary(Op::kImpl, F("Q(x)"), F("R(x)"))));
  CHECK(F("E x P(x) v Q(x)") == Formula::exists("x", F("P(x) v Q(x)")));
}

TEST_CASE("parser errors carry positions") {
  CHECK_THROWS_AS(F("dep(x ; )"), ParseError);
  CHECK_THROWS_AS(F("inc(x, y ; z)"), Error);
  CHECK_THROWS_AS(F("P(x) &"), ParseError);
  CHECK_THROWS_AS(F("$u0 = x"), ParseError);
  try {
    F("P(x) & & Q(x)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 8);
  }
  const Signature sig({{"P", 1}}, {{"c", 0}});
  CHECK_THROWS_AS(F("P(x, y)", &sig), Error);
  CHECK_THROWS_AS(F("Q(x)", &sig), Error);
  CHECK(F("P(c)", &sig) == Formula::rel("P", {Term::apply("c")}));
  try {
    parse_lines("P(x)\n# comment\n\nP(x) v\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK(parse_lines("P(x)\n# comment\n\nx = y # trailing\n").size() == 2);
}

TEST_CASE("strict flag rewrites lax operators") {
  ParseOptions options;
  options.strict = true;
  CHECK(parse("E y (P(y) v Q(y))", options) ==
        Formula::quantifier(Op::kExistsStrict, "y", Formula::binary(Op::kOrStrict, F("P(y)"), F("Q(y)"))));
}

TEST_CASE("format round-trips random formulas over every construct") {
  Rng rng(5);
  FormulaGen gen;
  gen.ops = all_ops();
  gen.functions = {{"f", 1}, {"c", 0}, {"g", 2}};
  gen.relations = {{"P", 1}, {"R", 2}, {"B", 0}};
  gen.max_depth = 6;
  gen.max_atom_width = 3;
  for (int i = 0; i < 2000; ++i) {
    const Formula phi = random_formula(rng, gen);
    const std::string text = format(phi);
    const Formula back = parse(text);
    CHECK_MESSAGE(back == phi, text);
    CHECK(format(back) == text);
  }
}

TEST_CASE("substitution") {
  const Term fz = Term::apply("f", {Term::var("z")});
  CHECK(substitute(F("x = y"), fz, "x") == Formula::eq(fz, Term::var("y")));
  const Formula bound = F("E x (x = y)");
  CHECK(substitute(bound, Term::apply("c"), "x") == bound);
  try {
    substitute(F("E z (x = z)"), Term::var("z"), "x");
    FAIL("expected capture");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCapture);
  }
  try {
    substitute(F("dep(x ; y)"), Term::apply("c"), "x");
    FAIL("expected a fragment error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFragment);
  }
  // Capture is harmless when x does not occur free below the binder.
  CHECK(substitute(F("(E z (z = y)) & x = y"), Term::var("z"), "x") == F("(E z (z = y)) & z = y"));
}

TEST_CASE("free variables after substitution") {
  Rng rng(17);
  FormulaGen gen;
  gen.functions = {{"f", 1}, {"g", 2}};
  gen.bound_vars = {"z", "w"};
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const Formula phi = random_formula(rng, gen);
    const Term t = pick(rng, 2) == 0 ? Term::apply("f", {Term::var("y")})
                                     : Term::apply("g", {Term::var("x"), Term::var("y")});
    if (!free_vars(phi).contains("x")) continue;
    Formula out;
    try {
      out = substitute(phi, t, "x");
    } catch (const Error&) {
      continue;
    }
    auto expected = free_vars(phi);
    expected.erase("x");
    for (const auto& v : vars_of(t)) expected.insert(v);
    CHECK(free_vars(out) == expected);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("desugaring of term atoms") {
  const Term fx = Term::apply("f", {Term::var("x")});
  const Term y = Term::var("y");
  const auto dep = desugar_term_atom(AtomKind::kDep, {fx}, {y});
  ParseOptions reserved;
  reserved.allow_reserved = true;
  CHECK(dep == parse("E $u0 E $u1 (dep($u0 ; $u1) & $u0 = f(x) & $u1 = y)", reserved));
  CHECK(desugar_term_atom(AtomKind::kDep, {Term::var("x")}, {y}) == F("dep(x ; y)"));
  const auto inc = desugar_term_atom(AtomKind::kInc, {fx}, {y});
  CHECK(inc == parse("E $u0 E $u1 (inc($u0 ; $u1) & $u0 = f(x) & $u1 = y)", reserved));
}

TEST_CASE("desugared atoms agree with the intended atom on every team") {
  // Intended meaning computed directly: values of the terms per row.
  const Signature sig({}, {{"f", 1}});
  const Term fx = Term::apply("f", {Term::var("x")});
  const Term y = Term::var("y");
  struct Case {
    AtomKind kind;
    std::vector<Term> left;
    std::vector<Term> right;
  };
  const std::vector<Case> cases = {
      {AtomKind::kDep, {fx}, {y}},
      {AtomKind::kInc, {fx}, {y}},
      {AtomKind::kExcl, {fx}, {y}},
      {AtomKind::kIndep, {fx}, {y}},
      {AtomKind::kDep, {}, {fx}},
  };
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::uint64_t index = 0; index < structure_count(sig, n); ++index) {
      const Structure m = structure_at(sig, n, index);
      const Team full = full_team({"x", "y"}, n);
      for (const auto& c : cases) {
        const Formula phi = desugar_term_atom(c.kind, c.left, c.right);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << full.size()); ++mask) {
          const Team x = subteam(full, mask);
          // The atom on the team of term values.
          std::vector<Tuple> rows;
          for (std::size_t r = 0; r < x.size(); ++r) {
            Tuple row;
            for (const auto& t : c.left) row.push_back(term_eval(m, x.assignment(r), t));
            for (const auto& t : c.right) row.push_back(term_eval(m, x.assignment(r), t));
            rows.push_back(row);
          }
          bool expected = false;
          const Structure plain(Signature(), n);
          if (c.left.empty()) {
            expected = naive_sat(plain, Team({"b"}, rows), Formula::dep({}, "b"));
          } else {
            const Team values({"a", "b"}, rows);
            switch (c.kind) {
              case AtomKind::kDep: expected = naive_sat(plain, values, Formula::dep({"a"}, "b")); break;
              case AtomKind::kInc: expected = naive_sat(plain, values, Formula::inc({"a"}, {"b"})); break;
              case AtomKind::kExcl: expected = naive_sat(plain, values, Formula::excl({"a"}, {"b"})); break;
              case AtomKind::kIndep: expected = naive_sat(plain, values, Formula::indep({"a"}, {"b"})); break;
            }
          }
          CHECK(eval(m, x, phi) == expected);
        }
      }
    }
  }
}

TEST_CASE("fragment labels") {
  const auto label = fragment_of(F("dep(x ; y) & x = y"));
  CHECK(label.dep);
  CHECK_FALSE(label.inc);
  CHECK(label.in_fo_c());
  CHECK(label.names() == std::vector<std::string>{"dep"});
  const auto strong = fragment_of(F("A x (indep(x ; y))"));
  CHECK(strong.indep);
  CHECK_FALSE(strong.lax_or);
  CHECK_FALSE(strong.lax_exists);
  CHECK(fragment_of(F("P(x) v Q(x)")).lax_or);
  CHECK(fragment_of(F("P(x) vs Q(x)")).uses_strict());
  CHECK_FALSE(fragment_of(F("P(x) -> Q(x)")).in_fo_c());
  CHECK_FALSE(fragment_of(F("~. P(x)")).in_fo_c());
}

TEST_CASE("syntactic closure classes") {
  CHECK(is_downward_closed(F("dep(x ; y) v excl(x ; y)")));
  CHECK(is_downward_closed(F("E z (dep(x ; z))")));
  CHECK(is_downward_closed(F("inc(x ; y) -> dep(x ; y)")));
  CHECK_FALSE(is_downward_closed(F("inc(x ; y)")));
  CHECK_FALSE(is_downward_closed(F("~. P(x)")));
  CHECK(is_union_closed(F("A z (inc(z ; x) v P(z))")));
  CHECK_FALSE(is_union_closed(F("dep( ; x)")));
  CHECK_FALSE(is_union_closed(F("inc(x ; y) vs P(x)")));
  CHECK(is_first_order(F("E z (P(z) vs z = x)")));
  CHECK_FALSE(is_first_order(F("E1 z (P(z))")));
}

TEST_CASE("signature inference and checking") {
  const auto sig = infer_signature({F("R(x, f(c())) & P(y)")});
  CHECK(sig.relation_index("R").has_value());
  CHECK(sig.functions().size() == 2);
  CHECK_THROWS_AS(infer_signature({F("R(x) & R(x, y)")}), Error);
  CHECK_THROWS_AS(check_signature(F("R(x)"), Signature({{"R", 2}}, {})), Error);
}

TEST_CASE("corpora have the advertised shape") {
  const auto fo = fo_corpus();
  CHECK(fo.size() == 50);
  for (const auto& phi : fo) {
    CHECK(is_first_order(phi));
    CHECK(depth(phi) <= 4);
  }
  for (const auto& phi : downward_corpus()) {
    const auto label = fragment_of(phi);
    CHECK_FALSE((label.inc || label.indep));
    CHECK(is_downward_closed(phi));
  }
  CHECK(downward_corpus().size() == 30);
  for (const auto& phi : union_corpus()) CHECK(is_union_closed(phi));
  CHECK(union_corpus().size() == 30);
  for (const auto& phi : locality_corpus()) {
    CHECK(free_vars(phi).size() <= 1);
    CHECK_FALSE(fragment_of(phi).uses_strict());
  }
  CHECK(locality_corpus().size() == 30);
  for (const auto& phi : atom_corpus()) {
    CHECK(fragment_of(phi).in_fo_c());
    CHECK_FALSE(fragment_of(phi).uses_strict());
    for (const auto& v : free_vars(phi)) CHECK((v == "x" || v == "y"));
  }
}
