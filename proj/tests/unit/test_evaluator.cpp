#include <doctest.h>

#include "helpers.hpp"
#include "teamlog/corpus.hpp"

using namespace testing;

namespace {

const Structure& two() {
  static const Structure m(Signature(), 2);
  return m;
}

std::vector<Op> every_op() {
  return {Op::kEq,       Op::kNeq,   Op::kRel,     Op::kNegRel,  Op::kDep,
          Op::kInc,      Op::kIndep, Op::kExcl,    Op::kAnd,     Op::kOr,
          Op::kOrStrict, Op::kIntOr, Op::kImpl,    Op::kWeakNeg, Op::kClassNeg,
          Op::kExists,   Op::kExistsStrict, Op::kForall, Op::kExists1, Op::kForall1};
}

std::string psi(int count) {
  // ψ_n: at least n distinct elements below x.
  std::string text;
  for (int i = 0; i < count; ++i) text += "E x" + std::to_string(i) + " ";
  std::string body;
  auto add = [&](const std::string& part) { body += body.empty() ? part : " & " + part; };
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) add("x" + std::to_string(i) + " != x" + std::to_string(j));
  }
  for (int i = 0; i < count; ++i) add("lt(x" + std::to_string(i) + ", x)");
  return text + "(" + body + ")";
}

}  // namespace

TEST_CASE("the two-element example") {
  const Team x({"x"}, {{0}, {1}});
  CHECK(eval(two(), x, F("A y (inc(y ; x))")));
  CHECK_FALSE(eval(two(), x, F("dep( ; x)")));
  CHECK(eval(two(), Team::unit(), F("E y E z (y != z)")));
  CHECK_FALSE(eval(Structure(Signature(), 1), Team::unit(), F("E y E z (y != z)")));
}

TEST_CASE("counting formulas on a linear order") {
  const Structure l5 = linear_order(5);
  const Formula psi3 = F(psi(3));
  CHECK(eval(l5, Team({"x"}, {{4}}), psi3));
  CHECK_FALSE(eval(l5, Team({"x"}, {{2}}), psi3));
  // Oracle: ψ_n holds on a team iff every x-value has at least n elements below it.
  for (int count = 1; count <= 3; ++count) {
    const Formula phi = F(psi(count));
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
      const Team x = subteam(full_team({"x"}, 5), mask);
      bool expected = true;
      for (const auto& row : x.rows()) expected = expected && row[0] >= static_cast<Element>(count);
      CHECK(eval(l5, x, phi) == expected);
    }
  }
}

TEST_CASE("dependency atoms") {
  const Structure& m = two();
  CHECK_FALSE(eval(m, Team({"x", "y"}, {{0, 0}, {1, 1}}), F("indep(x ; y)")));
  CHECK(eval(m, Team({"x", "y"}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}), F("indep(x ; y)")));
  const Structure m3(Signature(), 3);
  CHECK(eval(m3, Team({"x", "y"}, {{0, 1}, {0, 2}}), F("excl(x ; y)")));
  CHECK_FALSE(eval(m3, Team({"x", "y"}, {{0, 1}, {1, 0}}), F("excl(x ; y)")));
  CHECK(eval(m, Team({"x", "y"}, {{0, 1}, {1, 1}}), F("dep(x ; y)")));
  CHECK_FALSE(eval(m, Team({"x", "y"}, {{0, 0}, {0, 1}}), F("dep(x ; y)")));
  CHECK(eval(m, Team({"x", "y"}, {{0, 1}, {1, 0}}), F("inc(x ; y)")));
  CHECK(eval(m, Team({"x", "y", "z"}, {{0, 1, 1}, {1, 0, 1}}), F("inc(x, y ; y, x)")));
  CHECK_FALSE(eval(m, Team({"x", "y"}, {{0, 1}}), F("inc(x ; y)")));
  // Conditional independence with overlapping variables.
  CHECK(eval(m, Team({"x", "y"}, {{0, 0}, {1, 1}}), F("indep(x ; y | x)")));
  CHECK(eval(m, Team({"x", "y"}, {{0, 0}, {0, 1}}), F("indep(x ; x | y)")) ==
        naive_sat(m, Team({"x", "y"}, {{0, 0}, {0, 1}}), F("indep(x ; x | y)")));
}

TEST_CASE("empty team satisfies the lax and strict atom fragment") {
  const Structure m = make_structure(corpus_signature(), 2);
  for (const auto& phi : atom_corpus()) {
    CHECK(eval(m, Team({"x", "y"}, {}), phi));
    CHECK(eval(m, Team({"x", "y"}, {}), strictify(phi)));
  }
  CHECK_FALSE(eval(m, Team({"x"}, {}), F("~ (x = x)")));
  CHECK(eval(m, Team({"x"}, {}), F("~. (x = x)")));
}

TEST_CASE("evaluation errors") {
  const Structure& m = two();
  try {
    eval(m, Team({"x"}, {{0}}), F("dep(x ; y)"));
    FAIL("expected an unbound variable error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnbound);
  }
  CHECK_THROWS_AS(eval(m, Team({"x"}, {{0}}), F("P(x)")), Error);
  CHECK_THROWS_AS(eval(make_structure(Signature({{"P", 2}}, {}), 2), Team({"x"}, {{0}}), F("P(x)")),
                  Error);
  CHECK_THROWS_AS(eval(m, Team({"x"}, {{2}}), F("x = x")), Error);
  EvalOptions tight;
  tight.max_calls = 10;
  CHECK_THROWS_AS(eval(m, full_team({"x", "y"}, 2), F("A z E w (dep(z ; w) & inc(w ; x))"), tight),
                  BudgetExceeded);
  EvalOptions narrow;
  narrow.prune = false;
  narrow.max_split_rows = 2;
  CHECK_THROWS_AS(eval(m, full_team({"x", "y"}, 2), F("inc(x ; y) v inc(y ; x)"), narrow),
                  BudgetExceeded);
}

TEST_CASE("evaluator agrees with the definitional oracle on random instances") {
  Rng rng(2024);
  FormulaGen gen;
  gen.ops = every_op();
  gen.relations = {{"P", 1}, {"R", 2}};
  gen.functions = {{"f", 1}};
  const Signature sig({{"P", 1}, {"R", 2}}, {{"f", 1}});
  std::size_t true_count = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    // The oracle is exponential in nesting: deep formulas get small teams.
    gen.max_depth = trial % 4 == 0 ? 4 : 3;
    const std::size_t n = 1 + pick(rng, 2);
    const Structure m = random_structure(rng, sig, n);
    const Formula phi = random_formula(rng, gen);
    const Team x = random_team(rng, {"x", "y"}, n, gen.max_depth == 4 ? 2 : 3);
    const bool expected = naive_sat(m, x, phi);
    true_count += expected ? 1 : 0;
    CHECK_MESSAGE(eval(m, x, phi) == expected, format(phi), " on ", to_string(x));
    CHECK_MESSAGE(eval(m, x, phi, unpruned()) == expected, format(phi), " on ", to_string(x));
    CHECK_MESSAGE(eval(m, x, phi, unmemoized()) == expected, format(phi), " on ", to_string(x));
  }
  // Both verdicts occur often enough for the comparison to mean something.
  CHECK(true_count > 400);
  CHECK(true_count < 1600);
}

TEST_CASE("pruned and unpruned search agree on larger teams") {
  Rng rng(99);
  FormulaGen gen;
  gen.ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kDep, Op::kInc, Op::kExcl, Op::kIndep,
             Op::kAnd, Op::kOr, Op::kOrStrict, Op::kExists, Op::kExistsStrict, Op::kForall};
  gen.max_depth = 4;
  const Signature sig = corpus_signature();
  EvalOptions plain_options = unpruned();
  plain_options.max_calls = 200'000;
  int compared = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + pick(rng, 2);
    const Structure m = random_structure(rng, sig, n);
    const Formula phi = random_formula(rng, gen);
    const Team x = random_team(rng, {"x", "y"}, n, 5);
    const bool pruned = eval(m, x, phi);
    bool plain = false;
    try {
      plain = eval(m, x, phi, plain_options);
    } catch (const BudgetExceeded&) {
      continue;
    }
    ++compared;
    CHECK_MESSAGE(pruned == plain, format(phi), " on ", to_string(x));
  }
  CHECK(compared >= 360);
}

TEST_CASE("certificates re-verify") {
  Rng rng(7);
  FormulaGen gen;
  gen.ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kDep, Op::kInc, Op::kExcl, Op::kIndep, Op::kAnd,
             Op::kOr, Op::kOrStrict, Op::kExists, Op::kExistsStrict, Op::kForall, Op::kExists1};
  gen.max_depth = 4;
  const Signature sig = corpus_signature();
  std::size_t covers = 0;
  std::size_t supplements = 0;
  std::size_t skipped = 0;
  EvalOptions plain_options = unpruned();
  plain_options.max_calls = 200'000;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 1 + pick(rng, 3);
    const Structure m = random_structure(rng, sig, n);
    Formula phi = random_formula(rng, gen);
    const Team x = random_team(rng, {"x", "y"}, n, 4);
    for (const auto& options : {EvalOptions{}, plain_options}) {
      EvalResult result;
      try {
        result = eval_with_certificate(m, x, phi, options);
      } catch (const BudgetExceeded&) {
        ++skipped;
        continue;
      }
      if (!result.value) continue;
      const bool root_has_witness = phi.op == Op::kOr || phi.op == Op::kOrStrict ||
                                    phi.op == Op::kExists || phi.op == Op::kExistsStrict ||
                                    phi.op == Op::kExists1;
      CHECK((result.certificate.kind != Certificate::Kind::kNone) == root_has_witness);
      covers += result.certificate.kind == Certificate::Kind::kCover ? 1 : 0;
      supplements += result.certificate.kind == Certificate::Kind::kSupplement ? 1 : 0;
      CHECK_MESSAGE(verify_certificate(m, x, phi, result.certificate), format(phi), " on ",
                    to_string(x));
    }
  }
  CHECK(covers > 50);
  CHECK(supplements > 50);
  CHECK(skipped < 300);
}

TEST_CASE("a forged certificate is rejected") {
  const Team x({"x"}, {{0}, {1}});
  const Formula phi = F("dep( ; x) v dep( ; x)");
  auto result = eval_with_certificate(two(), x, phi);
  REQUIRE(result.value);
  Certificate forged = result.certificate;
  forged.left = x;
  forged.right = Team({"x"}, {});
  CHECK_FALSE(verify_certificate(two(), x, phi, forged));
  const Formula ex = F("E y (dep( ; y) & y = x)");
  Certificate bad;
  bad.kind = Certificate::Kind::kSupplement;
  bad.var = "y";
  bad.images = {{0}, {1}};
  CHECK_FALSE(verify_certificate(two(), x, ex, bad));
}

TEST_CASE("quantifier and connective consistency laws") {
  Rng rng(31);
  FormulaGen gen;
  gen.ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kNegRel, Op::kDep, Op::kInc, Op::kExcl,
             Op::kIndep, Op::kAnd, Op::kOr, Op::kExists, Op::kForall};
  gen.free_vars = {"x", "y", "z"};
  gen.bound_vars = {"z", "w"};
  gen.max_depth = 3;
  const Signature sig = corpus_signature();
  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t n = 1 + pick(rng, 3);
    const Structure m = random_structure(rng, sig, n);
    const Formula body = random_formula(rng, gen);
    const Formula other = random_formula(rng, gen);
    const Team x = random_team(rng, {"x", "y"}, n, 4);
    const Formula all = Formula::forall("z", body);
    const Formula some = Formula::exists("z", body);
    INFO(format(body) << " on " << to_string(x));
    CHECK(eval(m, x, all) == eval(m, duplicate(x, "z", m), body));
    if (!x.empty() && eval(m, x, all)) CHECK(eval(m, x, some));
    if (eval(m, x, Formula::quantifier(Op::kExistsStrict, "z", body))) CHECK(eval(m, x, some));
    if (free_vars(other).contains("z") || free_vars(body).contains("z")) continue;
    if (eval(m, x, Formula::binary(Op::kOrStrict, body, other))) {
      CHECK(eval(m, x, Formula::lax_or(body, other)));
    }
  }
}

TEST_CASE("flat evaluation matches team evaluation") {
  const Structure& m = two();
  CHECK(eval_flat_fo(m, Team({"x"}, {{0}, {1}}), F("E y (y = x)")));
  CHECK_FALSE(eval_flat_fo(m, Team({"x"}, {{0}}), F("x != x")));
  CHECK_THROWS_AS(eval_flat_fo(m, Team({"x"}, {{0}}), F("dep( ; x)")), Error);
  Rng rng(3);
  FormulaGen gen;
  gen.ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kNegRel, Op::kAnd, Op::kOr, Op::kOrStrict,
             Op::kExists, Op::kExistsStrict, Op::kForall};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + pick(rng, 3);
    const Structure s = random_structure(rng, corpus_signature(), n);
    const Formula phi = random_formula(rng, gen);
    const Team x = random_team(rng, {"x", "y"}, n, 9);
    CHECK(eval(s, x, phi) == eval_flat_fo(s, x, phi));
  }
}

TEST_CASE("satisfying teams") {
  const Structure& m = two();
  const auto constant = sat_teams(m, F("dep( ; x)"), {"x"});
  CHECK(constant == std::vector<Team>{Team({"x"}, {{0}}), Team({"x"}, {{1}})});
  CHECK(sat_teams(m, F("x = x"), {"x"}).size() == 3);
  CHECK(sat_teams(m, F("A y (inc(y ; x)) & dep( ; x)"), {"x"}).empty());
  CHECK_THROWS_AS(sat_teams(Structure(Signature(), 3), F("x = x"), {"x", "y", "z"}), BudgetExceeded);
}

TEST_CASE("satisfiability search") {
  const std::vector<Formula> gamma = {F("A y (inc(y ; x))"), F("E y E z (y != z)")};
  const auto found = sat_search(gamma, Signature(), 3);
  REQUIRE(found.found);
  CHECK(found.structure->size() == 2);
  CHECK(*found.team == Team({"x"}, {{0}, {1}}));
  auto with_dep = gamma;
  with_dep.push_back(F("dep( ; x)"));
  const auto none = sat_search(with_dep, Signature(), 3);
  CHECK_FALSE(none.found);
  CHECK(none.structures_checked == 3);
  CHECK(none.teams_checked == 1 + 3 + 7);
  const auto trivial = sat_search({F("x = x")}, Signature(), 3);
  REQUIRE(trivial.found);
  CHECK(trivial.structure->size() == 1);
}

TEST_CASE("substitution lemma instances") {
  const Signature sig({}, {{"c", 0}, {"f", 1}});
  Rng rng(41);
  const Term c = Term::apply("c");
  const Term fy = Term::apply("f", {Term::var("y")});
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      const Structure m = random_structure(rng, sig, n);
      const Team x = random_team(rng, {"x", "y"}, n, 4);
      CHECK(check_substitution(m, x, F("x = c()"), c, "x").agree());
      CHECK(check_substitution(m, x, F("E z (z = x & z != f(y))"), fy, "x").agree());
      CHECK(check_substitution(m, x, F("y = y"), c, "x").agree());
    }
  }
  CHECK_THROWS_AS(check_substitution(two(), Team({"x"}, {{0}}), F("dep( ; x)"), Term::var("x"), "x"),
                  Error);
}

TEST_CASE("downward-closed against union-closed disjuncts") {
  Rng rng(404);
  FormulaGen dc_gen;
  dc_gen.ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kDep, Op::kAnd, Op::kOrStrict, Op::kForall};
  dc_gen.max_depth = 2;
  FormulaGen uc_gen;
  uc_gen.ops = {Op::kEq, Op::kRel, Op::kInc, Op::kAnd, Op::kOr, Op::kExists, Op::kForall};
  uc_gen.max_depth = 2;
  const Signature sig = corpus_signature();
  int covers = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const std::size_t n = 1 + pick(rng, 2);
    const Structure m = random_structure(rng, sig, n);
    Formula dc = random_formula(rng, dc_gen);
    Formula uc = random_formula(rng, uc_gen);
    REQUIRE(is_downward_closed(dc));
    REQUIRE(is_union_closed(uc));
    if (trial % 2 == 1) std::swap(dc, uc);
    const Op op = trial % 3 == 0 ? Op::kOrStrict : Op::kOr;
    const Formula phi = Formula::binary(op, dc, uc);
    const Team x = random_team(rng, {"x", "y"}, n, 3);
    const auto result = eval_with_certificate(m, x, phi);
    CHECK_MESSAGE(result.value == naive_sat(m, x, phi), format(phi), " on ", to_string(x));
    if (result.value && result.certificate.kind == Certificate::Kind::kCover) {
      ++covers;
      CHECK_MESSAGE(verify_certificate(m, x, phi, result.certificate), format(phi));
    }
  }
  CHECK(covers > 100);
}

TEST_CASE("subformulas see only their free columns") {
  const Signature sig = corpus_signature();
  Rng rng(405);
  for (int trial = 0; trial < 100; ++trial) {
    const Structure m = random_structure(rng, sig, 2);
    // z and w are irrelevant to the body, so duplicating them must not change it.
    const Formula body = F("indep(y ; x | x) v P(x)");
    const Team x = random_team(rng, {"x", "y"}, 2, 4);
    const Formula all = F("A z A w (indep(y ; x | x) v P(x))");
    CHECK(eval(m, x, all) == eval(m, x, body));
    CHECK(eval(m, x, all) == naive_sat(m, x, body));
  }
}
