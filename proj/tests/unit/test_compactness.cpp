#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "teamlog/compactness.hpp"
#include "teamlog/corpus.hpp"

using namespace testing;

namespace {

std::size_t nesting(const Formula& phi) {
  std::size_t inner = 0;
  for (const auto& c : phi.children) inner = std::max(inner, nesting(c));
  return inner + ((phi.op == Op::kExists || phi.op == Op::kForall) ? 1 : 0);
}

/// Independent reading of the three conditions: membership tests by
/// enumerating the domain instead of comparing projected tables.
IntuitionRecord oracle_conditions(const Structure& m, const GammaSpec& gamma) {
  const auto& sig = m.signature();
  auto rel = [&](const std::string& name) { return *sig.relation_index(name); };
  auto all_tuples = [&](std::size_t arity) {
    std::vector<Tuple> out;
    for (std::size_t c = 0; c < m.table_size(arity); ++c) out.push_back(m.tuple_at(c, arity));
    return out;
  };
  IntuitionRecord out;
  out.cond1 = out.cond2 = out.cond3 = true;
  for (std::size_t k = 0; k < gamma.formulas.size(); ++k) {
    const auto index = gamma.index_set(k);
    const auto arity = gamma.vars_of(index).size();
    bool any = false;
    for (const auto& t : all_tuples(arity)) {
      const bool r = m.holds(rel(r_name(k)), t);
      any = any || r;
      if (r != m.holds(rel(s_name(index)), t)) out.cond2 = false;
    }
    if (!any) out.cond1 = false;
  }
  const std::size_t kappa = gamma.kappa();
  for (IndexMask big = 0; big < (IndexMask{1} << kappa); ++big) {
    for (IndexMask small = 0; small < (IndexMask{1} << kappa); ++small) {
      if ((small & big) != small) continue;
      // Every full κ-tuple a: S_I(a↾I) must equal ∃ extension in S_J.
      for (const auto& a : all_tuples(kappa)) {
        Tuple ai;
        for (std::size_t i = 0; i < kappa; ++i) {
          if ((small >> i) & 1U) ai.push_back(a[i]);
        }
        bool witness = false;
        for (const auto& b : all_tuples(kappa)) {
          bool matches = true;
          for (std::size_t i = 0; i < kappa; ++i) {
            if (((small >> i) & 1U) && a[i] != b[i]) matches = false;
          }
          if (!matches) continue;
          Tuple bj;
          for (std::size_t i = 0; i < kappa; ++i) {
            if ((big >> i) & 1U) bj.push_back(b[i]);
          }
          if (m.holds(rel(s_name(big)), bj)) witness = true;
        }
        if (witness != m.holds(rel(s_name(small)), ai)) out.cond3 = false;
      }
    }
  }
  return out;
}

struct Instance {
  Structure m;
  Team y;
  GammaSpec gamma;
};

/// Seeded (M, Y, Γ) with κ ≤ 3, |Γ| ≤ 2, n ≤ 3 and every ESO prefix within
/// 16 cells, or nothing after a bounded number of attempts.
std::optional<Instance> random_instance(Rng& rng) {
  const std::vector<std::string> pool = {"x", "y", "z"};
  FormulaGen gen;
  gen.bound_vars = {"u", "w"};
  gen.ops = {Op::kEq, Op::kNeq, Op::kRel, Op::kNegRel, Op::kDep, Op::kInc, Op::kExcl,
             Op::kIndep, Op::kAnd, Op::kOr, Op::kExists, Op::kForall};
  gen.max_depth = 3;
  for (int attempt = 0; attempt < 50; ++attempt) {
    const std::size_t kappa = 1 + pick(rng, 3);
    gen.free_vars.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(kappa));
    std::vector<Formula> gamma;
    std::size_t width = 0;
    for (std::size_t k = 0, count = 1 + pick(rng, 2); k < count; ++k) {
      gamma.push_back(random_formula(rng, gen));
      width = std::max(width, free_vars(gamma.back()).size() + nesting(gamma.back()));
    }
    std::size_t n = 3;
    auto cells = [&](std::size_t size) {
      std::size_t c = 1;
      for (std::size_t i = 0; i < width; ++i) c *= size;
      return c;
    };
    while (n > 1 && cells(n) > 16) --n;
    if (cells(n) > 16) continue;
    const auto m = random_structure(rng, corpus_signature(), n);
    for (int t = 0; t < 40; ++t) {
      const Team y = random_team(rng, gen.free_vars, n, 1 + pick(rng, 6));
      if (y.empty()) continue;
      const bool ok = std::all_of(gamma.begin(), gamma.end(),
                                  [&](const Formula& phi) { return eval(m, y, phi); });
      if (ok) return Instance{m, y, GammaSpec::make(gamma, gen.free_vars)};
    }
  }
  return std::nullopt;
}

Relation rel(std::size_t arity, std::vector<Tuple> tuples) { return Relation(arity, std::move(tuples)); }

}  // namespace

TEST_CASE("delta sentences") {
  const auto gamma = GammaSpec::make({F("dep(x0 ; x1)")});
  REQUIRE(gamma.variables == std::vector<std::string>{"x0", "x1"});
  CHECK(gamma.index_set(0) == 3);
  const auto delta = build_delta_gamma(gamma, corpus_signature());
  CHECK(delta.sentences.size() == 2 + 9);
  CHECK(delta.sentences.size() == expected_sentence_count(gamma));
  CHECK(to_string(delta.sentences[0]) == "E x0 E x1 R_0(x0,x1)");
  CHECK(to_string(delta.sentences[1]) == "A x0 A x1 (R_0(x0,x1) <-> S[0,1](x0,x1))");
  auto has = [&](const std::string& text) {
    return std::any_of(delta.sentences.begin(), delta.sentences.end(),
                       [&](const FoFormula& s) { return to_string(s) == text; });
  };
  CHECK(has("S[]() <-> E x0 S[0](x0)"));
  CHECK(has("A x0 (S[0](x0) <-> E x1 S[0,1](x0,x1))"));
  CHECK(has("A x1 (S[1](x1) <-> E x0 S[0,1](x0,x1))"));
  CHECK(has("S[]() <-> E x0 E x1 S[0,1](x0,x1)"));
  CHECK(has("A x0 (S[0](x0) <-> S[0](x0))"));
  CHECK(std::count(delta.schema.begin(), delta.schema.end(), 3) == 9);
  CHECK(delta.signature.relation_index("S[]").has_value());
  CHECK(delta.signature.relations()[*delta.signature.relation_index("S[]")].arity == 0);

  const auto empty = build_delta_gamma(GammaSpec::make({}), corpus_signature());
  REQUIRE(empty.sentences.size() == 1);
  CHECK(to_string(empty.sentences[0]) == "S[]() <-> S[]()");

  const auto shared = GammaSpec::make({F("P(x)"), F("dep(x ; y)")});
  const auto d2 = build_delta_gamma(shared, corpus_signature());
  CHECK(d2.sentences.size() == 4 + 9);
  CHECK(to_string(d2.sentences[2]) == "A x (R_0(x) <-> S[0](x))");
  CHECK(to_string(d2.sentences[3]) == "A x A y (R_1(x,y) <-> S[0,1](x,y))");

  CHECK_THROWS_AS(build_delta_gamma(gamma, Signature({{"R_0", 2}}, {})), Error);
  CHECK_THROWS_AS(GammaSpec::make({F("x = y")}, {"x"}), Error);
  CHECK_THROWS_AS(GammaSpec::make({F("x = x")}, {"x", "x"}), Error);
}

TEST_CASE("expansions satisfy the coherence conditions") {
  SUBCASE("worked example") {
    const auto gamma = GammaSpec::make({F("A y (inc(y ; x))"), F("E y (E z (y != z))")});
    CHECK(gamma.variables == std::vector<std::string>{"x"});
    const Structure m(corpus_signature(), 2);
    const Team y({"x"}, {{0}, {1}});
    const auto e = expand_model(m, y, gamma);
    CHECK(e.verified());
    CHECK(e.intuition.all());
    REQUIRE(e.crosschecks.size() == 2);
    CHECK(e.crosschecks[0].has_value());
    CHECK(e.structure.relation("R_1") == rel(0, {{}}));
    CHECK(e.structure.relation("S[0]") == rel(1, {{0}, {1}}));

    try {
      expand_model(m, y, GammaSpec::make({F("dep( ; x)")}));
      FAIL("expected a precondition error");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::kPrecondition);
      CHECK(std::string(err.what()).find("dep") != std::string::npos);
    }
    CHECK_THROWS_AS(expand_model(m, Team({"x"}, {}), gamma), Error);
    CHECK_THROWS_AS(expand_model(m, Team({"y"}, {{0}}), gamma), Error);
  }
  SUBCASE("singleton team") {
    const auto gamma = GammaSpec::make({F("dep(x ; y)"), F("inc(x ; y)")});
    const Structure m(corpus_signature(), 3);
    const auto e = expand_model(m, Team({"x", "y"}, {{2, 2}}), gamma);
    CHECK(e.verified());
    for (auto index : gamma.family()) CHECK(e.structure.relation(s_name(index)).size() == 1);
  }
  SUBCASE("empty gamma") {
    const auto gamma = GammaSpec::make({});
    const Structure m(corpus_signature(), 2);
    const auto e = expand_model(m, Team::unit(), gamma);
    CHECK(e.verified());
    CHECK(e.structure.signature().relations().size() == 3);
  }
  SUBCASE("broken tables") {
    const auto gamma = GammaSpec::make({F("P(x) v Q(y)")});
    const auto m = [] {
      Structure s(corpus_signature(), 2);
      s.set_relation(0, Tuple{0}, true);
      s.set_relation(1, Tuple{1}, true);
      return s;
    }();
    const auto e = expand_model(m, Team({"x", "y"}, {{0, 0}, {1, 1}}), gamma);
    REQUIRE(e.verified());

    auto emptied = e.structure;
    const auto r0 = *emptied.signature().relation_index("R_0");
    std::fill(emptied.mutable_relation_table(r0).begin(), emptied.mutable_relation_table(r0).end(), 0);
    const auto a = check_intuition(emptied, gamma);
    CHECK_FALSE(a.models_delta);
    CHECK_FALSE(a.cond1);

    const auto broken = apply_mutation(e.structure, {"S[0]", {1}});
    const auto b = check_intuition(broken, gamma);
    CHECK_FALSE(b.models_delta);
    CHECK_FALSE(b.cond3);
    CHECK(b.cond1);
    CHECK(b.cond2);

    CHECK_THROWS_AS(check_intuition(m, gamma), Error);
  }
}

TEST_CASE("coherence biconditional on random expansions and mutations") {
  Rng rng(2024);
  int expansions = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = random_instance(rng);
    if (!inst) continue;
    ++expansions;
    const auto e = expand_model(inst->m, inst->y, inst->gamma);
    const auto text = to_string(inst->y);
    CHECK_MESSAGE(e.verified(), text);
    const auto oracle = oracle_conditions(e.structure, inst->gamma);
    CHECK(oracle.conditions());
    CHECK(build_delta_gamma(inst->gamma, corpus_signature()).sentences.size() ==
          expected_sentence_count(inst->gamma));

    for (int k = 0; k < 3; ++k) {
      const auto mutation = random_breaking_mutation(e.structure, inst->gamma, rng);
      const auto mutated = apply_mutation(e.structure, mutation);
      const auto r = check_intuition(mutated, inst->gamma);
      const auto o = oracle_conditions(mutated, inst->gamma);
      CHECK_MESSAGE(r.consistent(), mutation.symbol);
      CHECK_FALSE(r.models_delta);
      CHECK(r.cond1 == o.cond1);
      CHECK(r.cond2 == o.cond2);
      CHECK(r.cond3 == o.cond3);
    }

    // Arbitrary flips keep the biconditional even when Δ survives.
    auto flipped = e.structure;
    const auto& rels = flipped.signature().relations();
    const auto idx = 2 + pick(rng, rels.size() - 2);
    const auto cells = flipped.table_size(rels[idx].arity);
    flipped.set_relation(idx, flipped.tuple_at(pick(rng, cells), rels[idx].arity),
                         pick(rng, 2) == 1);
    const auto r = check_intuition(flipped, inst->gamma);
    CHECK(r.consistent());
    CHECK(r.conditions() == oracle_conditions(flipped, inst->gamma).conditions());
  }
  CHECK(expansions >= 50);
}

TEST_CASE("merging coherent systems") {
  SUBCASE("diagonal") {
    CoherenceSystem s{{"x0", "x1"}, 2, {}};
    s.family = {{0, rel(0, {{}})},
                {1, rel(1, {{0}, {1}})},
                {2, rel(1, {{0}, {1}})},
                {3, rel(2, {{0, 0}, {1, 1}})}};
    const auto r = merge_teams(s);
    CHECK(r.verified);
    REQUIRE(r.team.has_value());
    CHECK(*r.team == Team({"x0", "x1"}, {{0, 0}, {1, 1}}));
    CHECK_FALSE(r.failure.has_value());
  }
  SUBCASE("pairwise constraints alone can verify") {
    CoherenceSystem s{{"x0", "x1"}, 2, {}};
    s.family = {{0, rel(0, {{}})}, {1, rel(1, {{0}})}, {2, rel(1, {{0}, {1}})}};
    const auto r = merge_teams(s);
    CHECK(r.verified);
    CHECK(r.candidate == Team({"x0", "x1"}, {{0, 0}, {0, 1}}));
  }
  SUBCASE("triangle without a top level") {
    CoherenceSystem s{{"x0", "x1", "x2"}, 2, {}};
    const auto both = rel(1, {{0}, {1}});
    s.family = {{0, rel(0, {{}})},
                {1, both},
                {2, both},
                {4, both},
                {3, rel(2, {{0, 0}, {1, 1}})},
                {6, rel(2, {{0, 0}, {1, 1}})},
                {5, rel(2, {{0, 1}, {1, 0}})}};
    const auto r = merge_teams(s);
    CHECK_FALSE(r.verified);
    CHECK_FALSE(r.team.has_value());
    CHECK(r.candidate.empty());
    REQUIRE(r.failure.has_value());
    CHECK(*r.failure == 0);

    // Each pair is coherent with the singletons it projects to.
    for (IndexMask pair : {3U, 5U, 6U}) {
      for (IndexMask single : {1U, 2U, 4U}) {
        if ((pair & single) != single) continue;
        const std::size_t col = (single < (pair & ~single)) ? 0 : 1;
        std::vector<Tuple> proj;
        for (const auto& t : s.family.at(pair).tuples()) proj.push_back({t[col]});
        CHECK(Relation(1, proj) == s.family.at(single));
      }
    }
  }
  SUBCASE("round trip through expansions") {
    Rng rng(99);
    int done = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto inst = random_instance(rng);
      if (!inst) continue;
      ExpansionOptions opts;
      opts.crosscheck = false;
      const auto e = expand_model(inst->m, inst->y, inst->gamma, opts);
      const auto r = merge_teams(coherence_system(e.structure, inst->gamma));
      CHECK(r.verified);
      const auto& vars = inst->gamma.variables;
      CHECK(r.candidate == restrict(inst->y, {vars.begin(), vars.end()}));
      ++done;
    }
    CHECK(done >= 30);
  }
  SUBCASE("shape errors") {
    CoherenceSystem s{{"x0"}, 2, {{1, rel(2, {})}}};
    CHECK_THROWS_AS(merge_teams(s), Error);
    s.family = {{2, rel(1, {})}};
    CHECK_THROWS_AS(merge_teams(s), Error);
    s.family = {{1, rel(1, {{5}})}};
    CHECK_THROWS_AS(merge_teams(s), Error);
  }
}
