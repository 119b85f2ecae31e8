#include <doctest.h>

#include "helpers.hpp"
#include "teamlog/corpus.hpp"

using namespace testing;

TEST_CASE("signature rejects duplicate symbol names") {
  CHECK_THROWS_AS(Signature({{"R", 1}}, {{"R", 0}}), Error);
  CHECK_THROWS_AS(Signature({{"R", 1}, {"R", 2}}, {}), Error);
  Signature sig({{"R", 2}}, {{"c", 0}, {"f", 1}});
  CHECK(sig.relation_index("R") == 0);
  CHECK(sig.function_index("f") == 1);
  CHECK_FALSE(sig.relation_index("f").has_value());
}

TEST_CASE("structure tables") {
  Signature sig({{"R", 2}, {"B", 0}}, {{"c", 0}, {"f", 1}});
  Structure m(sig, 3);
  CHECK_THROWS_AS(Structure(sig, 0), Error);
  m.set_relation(0, Tuple{2, 1}, true);
  CHECK(m.holds(0, Tuple{2, 1}));
  CHECK_FALSE(m.holds(0, Tuple{1, 2}));
  CHECK_FALSE(m.holds(1, Tuple{}));
  m.set_relation(1, Tuple{}, true);
  CHECK(m.holds(1, Tuple{}));
  CHECK_THROWS_AS(m.holds(0, Tuple{3, 0}), Error);
  CHECK_THROWS_AS(m.holds(0, Tuple{0}), Error);
  CHECK(m.relation("R").tuples() == std::vector<Tuple>{{2, 1}});
  CHECK(m.apply(0, Tuple{}) == 0);
}

TEST_CASE("term_eval") {
  Signature sig({}, {{"c", 0}, {"f", 1}});
  Structure m(sig, 4);
  m.set_function(0, Tuple{}, 1);
  for (Element a = 0; a < 4; ++a) m.set_function(1, Tuple{a}, (a + 1) % 4);
  const Assignment s({"x"}, {3});
  CHECK(term_eval(m, s, Term::var("x")) == 3);
  CHECK(term_eval(m, s, Term::apply("c")) == 1);
  CHECK(term_eval(m, s, Term::apply("f", {Term::var("x")})) == 0);
  CHECK(term_eval(m, s, Term::apply("f", {Term::apply("f", {Term::apply("c")})})) == 3);
  CHECK_THROWS_AS(term_eval(m, s, Term::var("y")), Error);
  CHECK_THROWS_AS(term_eval(m, s, Term::apply("g")), Error);
  CHECK_THROWS_AS(term_eval(m, s, Term::apply("f")), Error);
}

TEST_CASE("team canonical form") {
  const Team a({"y", "x"}, {{1, 0}, {0, 0}, {1, 0}});
  CHECK(a.vars() == std::vector<std::string>{"x", "y"});
  CHECK(a.rows() == std::vector<Tuple>{{0, 0}, {0, 1}});
  CHECK_THROWS_AS(Team({"x", "x"}, {}), Error);
  CHECK_THROWS_AS(Team({"x"}, {{0, 1}}), Error);
  const Team unit = Team::unit();
  CHECK(unit.size() == 1);
  CHECK(unit.vars().empty());
  CHECK(Team({}, {}).empty());
  CHECK_FALSE(Team({}, {}) == unit);
}

TEST_CASE("team validation names row and column") {
  const Team x({"x", "y"}, {{0, 0}, {1, 5}});
  try {
    x.validate(3);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("row 1") != std::string::npos);
    CHECK(what.find("'y'") != std::string::npos);
  }
}

TEST_CASE("restrict") {
  const Team x({"x", "y"}, {{0, 0}, {0, 1}});
  CHECK(restrict(x, {"x"}) == Team({"x"}, {{0}}));
  CHECK(restrict(x, {"x", "y"}) == x);
  CHECK(restrict(Team({"x", "y"}, {}), {"y"}) == Team({"y"}, {}));
  CHECK(restrict(x, {}) == Team::unit());
  CHECK_THROWS_AS(restrict(x, {"z"}), Error);
}

TEST_CASE("project") {
  const Team x({"x", "y"}, {{0, 1}, {1, 1}});
  CHECK(project(x, {"y", "x"}).tuples() == std::vector<Tuple>{{1, 0}, {1, 1}});
  CHECK(project(Team::unit(), {}).tuples() == std::vector<Tuple>{Tuple{}});
  CHECK(project(Team({"x"}, {}), {"x"}).empty());
  CHECK_THROWS_AS(project(x, {"z"}), Error);
}

TEST_CASE("duplicate and supplement") {
  const Structure m2(Signature(), 2);
  const Structure m3(Signature(), 3);
  const Team x({"x"}, {{0}});
  CHECK(duplicate(x, "y", m2) == Team({"x", "y"}, {{0, 0}, {0, 1}}));
  CHECK(duplicate(Team({"x"}, {}), "y", m2).empty());
  CHECK(duplicate(x, "x", m2) == Team({"x"}, {{0}, {1}}));

  const SupplementFunction f(x, {{1, 2}}, 3);
  CHECK(supplement(x, "y", f) == Team({"x", "y"}, {{0, 1}, {0, 2}}));
  const SupplementFunction g(x, {{2}}, 3);
  CHECK(supplement(x, "y", g) == supplement_const(x, "y", 2, m3));
  const Team empty({"x"}, {});
  CHECK(supplement(empty, "y", SupplementFunction(empty, {}, 3)).empty());
  CHECK_THROWS_AS(SupplementFunction(x, {}, 3), Error);
  CHECK_THROWS_AS(SupplementFunction(x, {{}}, 3), Error);
  CHECK_THROWS_AS(SupplementFunction(x, {{3}}, 3), Error);
  CHECK_THROWS_AS(supplement(Team({"x"}, {{1}}), "y", f), Error);

  const Team two({"x"}, {{0}, {1}});
  CHECK(supplement_const(two, "y", 1, m2) == Team({"x", "y"}, {{0, 1}, {1, 1}}));
  CHECK(supplement_const(x, "x", 0, m2) == x);
  CHECK(supplement_const(empty, "y", 1, m2).empty());
  CHECK_THROWS_AS(supplement_const(x, "y", 2, m2), Error);
}

TEST_CASE("team operations satisfy their algebraic laws on random teams") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + pick(rng, 3);
    const Structure m(Signature(), n);
    const Team x = random_team(rng, {"x", "y", "z"}, n, 6);
    const Team copy = x;
    // Nested restriction collapses to the inner set.
    CHECK(restrict(restrict(x, {"x", "y"}), {"x"}) == restrict(x, {"x"}));
    CHECK(project(x, {"x", "z"}).size() <= x.size());
    CHECK(project(x, {"x", "y", "z"}).size() == x.size());
    if (!x.empty()) CHECK(restrict(duplicate(x, "w", m), {"x", "y", "z"}) == x);
    std::vector<std::vector<Element>> all(x.size());
    for (auto& image : all) {
      for (Element a = 0; a < n; ++a) image.push_back(a);
    }
    CHECK(supplement(x, "w", SupplementFunction(x, all, n)) == duplicate(x, "w", m));
    CHECK(supplement(x, "y", SupplementFunction(x, all, n)) == duplicate(x, "y", m));
    CHECK(x == copy);
  }
}

TEST_CASE("canonical subset order") {
  const auto order = canonical_subset_order(3);
  CHECK(order == std::vector<std::uint64_t>{0, 1, 2, 4, 3, 5, 6, 7});
  CHECK(canonical_subset_order(0) == std::vector<std::uint64_t>{0});
}

TEST_CASE("structure enumeration covers every labeled structure once") {
  const Signature sig({{"P", 1}}, {{"c", 0}});
  CHECK(structure_count(sig, 2) == 8);
  std::vector<Structure> seen;
  for (std::uint64_t i = 0; i < 8; ++i) {
    auto m = structure_at(sig, 2, i);
    for (const auto& other : seen) CHECK_FALSE(other == m);
    seen.push_back(std::move(m));
  }
  CHECK(structure_at(sig, 2, 0).relation("P").empty());
  CHECK(structure_at(sig, 2, 1).apply(0, Tuple{}) == 1);
  CHECK_THROWS_AS(structure_at(sig, 2, 8), Error);
}
