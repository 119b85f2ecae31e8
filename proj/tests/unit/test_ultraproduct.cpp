#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "teamlog/corpus.hpp"
#include "teamlog/ultraproduct.hpp"

using namespace testing;

namespace {

Structure with_p(std::size_t n, const std::vector<Element>& p) {
  const auto sig = corpus_signature();
  Structure m(sig, n);
  for (auto a : p) m.set_relation(0, Tuple{a}, true);
  return m;
}

struct Family {
  std::vector<Structure> structures;
  std::vector<Team> xs;
  std::vector<Team> ys;
};

Family random_family(Rng& rng, std::size_t k, const Signature& sig,
                     const std::vector<std::string>& vars, std::size_t max_rows) {
  Family f;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t n = 1 + pick(rng, 3);
    f.structures.push_back(random_structure(rng, sig, n));
    f.xs.push_back(random_team(rng, vars, n, pick(rng, max_rows + 1)));
    f.ys.push_back(random_team(rng, vars, n, pick(rng, max_rows + 1)));
  }
  return f;
}

/// Product codes with coordinate 0 most significant.
std::vector<Tuple> all_elements(const std::vector<Structure>& ms) {
  std::vector<Tuple> out = {Tuple{}};
  for (const auto& m : ms) {
    std::vector<Tuple> next;
    for (const auto& t : out) {
      for (Element a = 0; a < m.size(); ++a) {
        auto u = t;
        u.push_back(a);
        next.push_back(u);
      }
    }
    out = next;
  }
  return out;
}

IndexSet agreement(const Tuple& f, const Tuple& g) {
  IndexSet out = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == g[i]) out |= 1U << i;
  }
  return out;
}

}  // namespace

TEST_CASE("ultrafilters on small index sets") {
  for (std::size_t k = 1; k <= 5; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto u = Ultrafilter::principal(k, j);
      CHECK(u.satisfies_axioms());
      const IndexSet all = u.full();
      const auto list = u.members();
      const std::set<IndexSet> members(list.begin(), list.end());
      CHECK_FALSE(members.count(0));
      CHECK(members.count(all));
      for (IndexSet a = 0; a <= all; ++a) {
        CHECK(members.count(a) + members.count(all & ~a) == 1);
        for (IndexSet b = 0; b <= all; ++b) {
          if (members.count(a) && members.count(b)) CHECK(members.count(a & b));
          if (members.count(a) && (a & b) == a) CHECK(members.count(b));
        }
      }
    }
  }
  CHECK(ultrafilter_from_fip(3, {0b011, 0b110}).generator() == 1);
  CHECK(ultrafilter_from_fip(2, {}).generator() == 0);
  const auto u = ultrafilter_from_fip(4, {0b1100, 0b1110});
  CHECK(u.contains(0b1100));
  CHECK(u.contains(0b1110));
  try {
    ultrafilter_from_fip(2, {0b01, 0b10});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoUltrafilter);
    CHECK(std::string(e.what()).find("requires non-principal ultrafilter (infinite I)") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(Ultrafilter::principal(0, 0), Error);
  CHECK_THROWS_AS(Ultrafilter::principal(3, 3), Error);
  CHECK_THROWS_AS(Ultrafilter::principal(17, 0), Error);
}

TEST_CASE("product structure from the definition") {
  Rng rng(404);
  const auto sig = corpus_signature();
  SUBCASE("singleton index") {
    const auto m = random_structure(rng, sig, 3);
    const auto p = product_structure({m}, Ultrafilter::principal(1, 0));
    CHECK(p.structure == m);
    CHECK(p.class_of == std::vector<Element>{0, 1, 2});
  }
  SUBCASE("two classes when U is generated by a 2-element coordinate") {
    const auto p = product_structure({random_structure(rng, sig, 2), random_structure(rng, sig, 3)},
                                     Ultrafilter::principal(2, 0));
    CHECK(p.structure.size() == 2);
  }
  SUBCASE("relations and functions against every representative") {
    const Signature fsig({{"R", 2}}, {{"f", 1}, {"c", 0}});
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t k = 1 + pick(rng, 3);
      std::vector<Structure> ms;
      for (std::size_t i = 0; i < k; ++i) ms.push_back(random_structure(rng, fsig, 1 + pick(rng, 3)));
      const auto u = Ultrafilter::principal(k, pick(rng, k));
      const auto p = product_structure(ms, u);
      const auto elems = all_elements(ms);
      // Quotient map: same class iff the agreement set is in U.
      for (const auto& f : elems) {
        for (const auto& g : elems) {
          CHECK((p.class_of_tuple(f) == p.class_of_tuple(g)) == u.contains(agreement(f, g)));
        }
      }
      for (const auto& f : elems) {
        for (const auto& g : elems) {
          IndexSet in_r = 0;
          for (std::size_t i = 0; i < k; ++i) {
            if (ms[i].holds(0, Tuple{f[i], g[i]})) in_r |= 1U << i;
          }
          CHECK(p.structure.holds(0, Tuple{p.class_of_tuple(f), p.class_of_tuple(g)}) ==
                u.contains(in_r));
        }
        Tuple image(k);
        for (std::size_t i = 0; i < k; ++i) image[i] = ms[i].apply(0, Tuple{f[i]});
        CHECK(p.structure.apply(0, Tuple{p.class_of_tuple(f)}) == p.class_of_tuple(image));
      }
      Tuple constant(k);
      for (std::size_t i = 0; i < k; ++i) constant[i] = ms[i].apply(1, Tuple{});
      CHECK(p.structure.apply(1, Tuple{}) == p.class_of_tuple(constant));
    }
  }
  SUBCASE("errors") {
    const Signature other({{"R", 2}}, {});
    CHECK_THROWS_AS(product_structure({random_structure(rng, sig, 2), Structure(other, 2)},
                                      Ultrafilter::principal(2, 0)),
                    Error);
    CHECK_THROWS_AS(product_structure({Structure(sig, 2)}, Ultrafilter::principal(2, 0)), Error);
    std::vector<Structure> big(3, Structure(sig, 17));
    CHECK_THROWS_AS(product_structure(big, Ultrafilter::principal(3, 0)), BudgetExceeded);
  }
}

TEST_CASE("team ultraproduct examples") {
  Rng rng(31);
  const auto sig = corpus_signature();
  const std::vector<std::string> vars = {"x", "y"};
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + pick(rng, 3);
    const auto fam = random_family(rng, k, sig, vars, 4);
    const std::size_t j = pick(rng, k);
    const auto u = Ultrafilter::principal(k, j);
    const auto p = product_structure(fam.structures, u);
    const Team x = team_ultraproduct(p, fam.xs, u);
    // Principal case: the image of X_j, mapping a value a to the class of
    // any product element with coordinate j equal to a.
    std::vector<Tuple> expected;
    for (const auto& row : fam.xs[j].rows()) {
      Tuple out;
      for (auto a : row) {
        for (Element c = 0; c < p.structure.size(); ++c) {
          if (p.representative[c][j] == a) out.push_back(c);
        }
      }
      expected.push_back(out);
    }
    CHECK(x == Team(vars, expected));
    CHECK(check_principal_isomorphism(fam.structures, fam.xs, u).holds());
  }
  SUBCASE("equal teams over equal domains") {
    const auto m = random_structure(rng, sig, 2);
    const Team x(vars, {{0, 1}, {1, 1}});
    const auto u = Ultrafilter::principal(3, 2);
    const auto p = product_structure({m, m, m}, u);
    const Team prod = team_ultraproduct(p, {x, x, x}, u);
    CHECK(prod.size() == x.size());
    CHECK(check_principal_isomorphism({m, m, m}, {x, x, x}, u).holds());
  }
  SUBCASE("empty on a U-large set") {
    const auto m = random_structure(rng, sig, 2);
    const Team full = full_team(vars, 2);
    const auto u = Ultrafilter::principal(2, 1);
    const auto p = product_structure({m, m}, u);
    CHECK(team_ultraproduct(p, {full, Team(vars, {})}, u).empty());
  }
  SUBCASE("domain mismatch") {
    const auto m = random_structure(rng, sig, 2);
    const auto u = Ultrafilter::principal(2, 0);
    const auto p = product_structure({m, m}, u);
    CHECK_THROWS_AS(team_ultraproduct(p, {Team({"x"}, {{0}}), Team({"y"}, {{0}})}, u), Error);
    CHECK_THROWS_AS(team_ultraproduct(p, {Team({"x"}, {{0}})}, u), Error);
  }
}

TEST_CASE("team lemma identities on a randomized suite") {
  const auto sig = corpus_signature();
  int premises = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::size_t k = 1 + pick(rng, 3);
    const std::vector<std::string> vars = pick(rng, 2) ? std::vector<std::string>{"x"}
                                                       : std::vector<std::string>{"x", "y"};
    const auto fam = random_family(rng, k, sig, vars, 3);
    const auto u = Ultrafilter::principal(k, pick(rng, k));
    LemmaInput in;
    in.structures = fam.structures;
    in.xs = fam.xs;
    in.ys = fam.ys;
    in.var = pick(rng, 2) ? "x" : "z";
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t n = fam.structures[i].size();
      in.elements.push_back(static_cast<Element>(pick(rng, n)));
      std::vector<std::vector<Element>> images;
      const bool single = pick(rng, 2) == 0;
      for (std::size_t r = 0; r < fam.xs[i].size(); ++r) {
        std::vector<Element> img;
        for (Element a = 0; a < n; ++a) {
          if (pick(rng, 2)) img.push_back(a);
        }
        if (img.empty() || single) img = {static_cast<Element>(pick(rng, n))};
        images.push_back(img);
      }
      in.images.push_back(images);
    }
    for (auto kind : {LemmaKind::kUnion, LemmaKind::kDisjointness, LemmaKind::kConstSupplement,
                      LemmaKind::kDuplicate, LemmaKind::kSupplement}) {
      const auto r = check_team_lemma(in, kind, u);
      CHECK_MESSAGE(r.holds, to_string(kind) << " seed " << seed);
      premises += r.side_premise;
    }
  }
  CHECK(premises > 0);
  CHECK(lemma_kind_from_string("const-supplement") == LemmaKind::kConstSupplement);
  CHECK_FALSE(lemma_kind_from_string("tensor"));
}

TEST_CASE("disjointness transfers") {
  const auto sig = corpus_signature();
  const Structure m(sig, 2);
  LemmaInput in;
  in.structures = {m, m};
  in.xs = {Team({"x"}, {{0}}), Team({"x"}, {{0}, {1}})};
  in.ys = {Team({"x"}, {{1}}), Team({"x"}, {{0}, {1}})};
  const auto r = check_team_lemma(in, LemmaKind::kDisjointness, Ultrafilter::principal(2, 0));
  CHECK(r.side_premise);
  CHECK(r.holds);
  CHECK(r.lhs.empty());
  const auto s = check_team_lemma(in, LemmaKind::kDisjointness, Ultrafilter::principal(2, 1));
  CHECK_FALSE(s.side_premise);
  CHECK_FALSE(s.lhs.empty());
}

TEST_CASE("Łoś checks") {
  const auto phi = F("P(x)");
  const std::vector<Structure> ms = {with_p(2, {0}), with_p(2, {})};
  const std::vector<Team> xs = {Team({"x"}, {{0}}), Team({"x"}, {{0}})};
  const auto at0 = check_los(ms, xs, Ultrafilter::principal(2, 0), phi);
  CHECK(at0.lhs);
  CHECK(at0.rhs);
  const auto at1 = check_los(ms, xs, Ultrafilter::principal(2, 1), phi);
  CHECK_FALSE(at1.lhs);
  CHECK_FALSE(at1.rhs);
  CHECK(at0.strong_claimed);

  CHECK(strong_los_eligible(fragment_of(F("A x (indep(x ; y))"))));
  CHECK_FALSE(strong_los_eligible(fragment_of(F("E z (dep(x ; z))"))));
  CHECK_FALSE(strong_los_eligible(fragment_of(F("P(x) v Q(x)"))));
  CHECK(weak_los_eligible(F("E z (dep(x ; z))")));
  CHECK(weak_los_eligible(F("~(dep(x ; y))")));
  CHECK_FALSE(weak_los_eligible(F("~(P(x) v Q(x))")));
  CHECK_FALSE(weak_los_eligible(F("P(x) -> Q(x)")));

  Rng rng(2718);
  const auto corpus = atom_corpus();
  for (int family = 0; family < 30; ++family) {
    const std::size_t k = 1 + pick(rng, 3);
    const auto fam = random_family(rng, k, corpus_signature(), {"x", "y"}, 3);
    const auto u = Ultrafilter::principal(k, pick(rng, k));
    for (const auto& f : corpus) {
      const auto rec = check_los(fam.structures, fam.xs, u, f);
      CHECK_MESSAGE(rec.agree(), format(f));
    }
  }
}
