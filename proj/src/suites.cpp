#include "teamlog/suites.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>

#include "teamlog/errors.hpp"
#include "teamlog/parser.hpp"
#include "teamlog/properties.hpp"
#include "teamlog/ultraproduct.hpp"

namespace teamlog {

namespace {

/// Collects counts and the first few failure descriptions.
struct Tally {
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  Json first_failures = Json::array();

  void check(bool ok, const std::function<std::string()>& describe) {
    ++cases;
    if (ok) return;
    ++failures;
    if (first_failures.size() < 5) first_failures.push_back(describe());
  }
};

std::size_t quantifier_nesting(const Formula& phi) {
  std::size_t inner = 0;
  for (const auto& c : phi.children) inner = std::max(inner, quantifier_nesting(c));
  return inner + (phi.is_quantifier() ? 1 : 0);
}

std::uint64_t power(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

/// Largest relation an ESO translation of φ over its free variables needs.
std::uint64_t eso_cells(const Formula& phi, std::size_t n) {
  return power(n, free_vars(phi).size() + quantifier_nesting(phi));
}

std::vector<Structure> all_structures(const Signature& sig, std::size_t n) {
  std::vector<Structure> out;
  const auto count = structure_count(sig, n);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(structure_at(sig, n, i));
  return out;
}

std::vector<Formula> full_corpus() {
  std::vector<Formula> out;
  auto add = [&](const std::vector<Formula>& more) {
    for (const auto& f : more) {
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
  };
  add(fo_corpus());
  add(downward_corpus());
  add(union_corpus());
  add(locality_corpus());
  add(strict_locality_corpus());
  add(atom_corpus());
  return out;
}

std::vector<Formula> parse_all(const std::vector<std::string>& texts) {
  std::vector<Formula> out;
  for (const auto& t : texts) out.push_back(parse(t));
  return out;
}

const std::vector<std::string> kGammaExample = {"A y (inc(y ; x))", "E y (E z (y != z))"};

void suite_example(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  const auto gamma = parse_all(kGammaExample);
  const auto sig = infer_signature(gamma);
  const auto found = sat_search(gamma, sig, 2, options.eval);
  const bool exact = found.found && found.structure->size() == 2 &&
                     *found.team == Team({"x"}, {{0}, {1}});
  tally.check(exact, [&] {
    return found.found ? "found team " + to_string(*found.team) : std::string("Γ reported unsatisfiable");
  });

  auto extended = gamma;
  extended.push_back(parse("dep( ; x)"));
  std::uint64_t teams = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& m : all_structures(sig, n)) {
      const Team full = full_team({"x"}, n);
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << full.size()); ++mask) {
        const Team x = subteam(full, mask);
        ++teams;
        const bool all = std::all_of(extended.begin(), extended.end(),
                                     [&](const Formula& phi) { return eval(m, x, phi, options.eval); });
        tally.check(!all, [&] { return "Γ ∪ {dep( ; x)} holds on " + to_string(x); });
      }
    }
  }
  const auto search = sat_search(extended, sig, 3, options.eval);
  tally.check(!search.found, [] { return std::string("sat_search found a model of Γ ∪ {dep( ; x)}"); });
  report.data["satisfiable_team"] = found.found ? team_to_json(*found.team) : Json();
  report.data["satisfiable_size"] = found.found ? found.structure->size() : 0;
  report.data["extended_teams_checked"] = teams;
  report.data["extended_search_structures"] = search.structures_checked;
}

void suite_flatness(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  const auto sig = corpus_signature();
  const std::vector<std::string> pool = {"x", "y"};
  std::uint64_t teams = 0;
  for (const auto& phi : fo_corpus()) {
    const auto fv = free_vars(phi);
    // Every domain D with Fv(φ) ⊆ D ⊆ {x, y}.
    std::vector<std::vector<std::string>> domains;
    for (unsigned mask = 0; mask < 4; ++mask) {
      std::vector<std::string> d;
      for (unsigned i = 0; i < 2; ++i) {
        if ((mask >> i) & 1U) d.push_back(pool[i]);
      }
      if (std::includes(d.begin(), d.end(), fv.begin(), fv.end())) domains.push_back(d);
    }
    for (std::size_t n = 1; n <= 3; ++n) {
      for (const auto& m : all_structures(sig, n)) {
        for (const auto& d : domains) {
          const Team full = full_team(d, n);
          TeamEvaluator ev(m, phi, d, options.eval);
          std::vector<std::uint64_t> codes;
          std::vector<bool> pointwise;
          for (std::size_t r = 0; r < full.size(); ++r) {
            codes.push_back(ev.encode(Team(d, {full.rows()[r]}))[0]);
            pointwise.push_back(tarski(m, full.assignment(r), phi));
          }
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << full.size()); ++mask) {
            std::vector<std::uint64_t> sel;
            bool expected = true;
            for (std::size_t r = 0; r < full.size(); ++r) {
              if (!((mask >> r) & 1U)) continue;
              sel.push_back(codes[r]);
              expected = expected && pointwise[r];
            }
            std::sort(sel.begin(), sel.end());
            ++teams;
            tally.check(ev.sat_encoded(sel) == expected, [&] {
              return format(phi) + " on " + to_string(subteam(full, mask)) + " (n=" +
                     std::to_string(n) + ")";
            });
          }
        }
      }
    }
  }
  report.data["formulas"] = fo_corpus().size();
  report.data["teams_checked"] = teams;
}

void suite_closure(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  const auto sig = corpus_signature();
  PropertyOptions popts;
  popts.eval = options.eval;
  popts.seed = options.seed;
  std::vector<std::vector<Structure>> by_size;
  for (std::size_t n = 1; n <= 3; ++n) by_size.push_back(all_structures(sig, n));

  auto sweep = [&](const char* label, const std::vector<Formula>& corpus, auto&& check,
                   std::uint64_t& count) {
    for (const auto& phi : corpus) {
      for (const auto& ms : by_size) {
        for (const auto& m : ms) {
          const auto v = check(m, phi);
          ++count;
          tally.check(v.holds && v.coverage == Coverage::kExhaustive, [&] {
            return std::string(label) + ": " + format(phi) +
                   (v.counterexample ? " fails, " + v.counterexample->note : " not exhaustive");
          });
        }
      }
    }
  };
  const std::vector<std::string> xy = {"x", "y"};
  std::uint64_t down = 0, uni = 0, local = 0, empty = 0;
  sweep("downward", downward_corpus(),
        [&](const Structure& m, const Formula& phi) { return check_downward(m, phi, xy, popts); }, down);
  sweep("union", union_corpus(),
        [&](const Structure& m, const Formula& phi) { return check_union_closure(m, phi, xy, popts); },
        uni);
  auto with_dummy = [](const Formula& phi) {
    auto d = free_var_list(phi);
    d.push_back("u");
    return d;
  };
  sweep("locality", locality_corpus(),
        [&](const Structure& m, const Formula& phi) {
          return check_locality(m, phi, with_dummy(phi), popts);
        },
        local);
  auto forced = popts;
  forced.force = true;
  sweep("empty-team", full_corpus(),
        [&](const Structure& m, const Formula& phi) { return check_empty_team(m, phi, forced); }, empty);

  std::optional<PropertyVerdict> violation;
  std::optional<Formula> violating;
  for (const auto& phi : strict_locality_corpus()) {
    for (const auto& ms : by_size) {
      for (const auto& m : ms) {
        if (violation) break;
        auto v = check_locality(m, phi, with_dummy(phi), popts);
        if (!v.holds) {
          violation = std::move(v);
          violating = phi;
        }
      }
    }
  }
  const bool confirmed = violation && reverify(*violation, *violating, options.eval);
  tally.check(confirmed, [] { return std::string("no strict locality violation found for n <= 3"); });
  report.data["downward_checks"] = down;
  report.data["union_checks"] = uni;
  report.data["locality_checks"] = local;
  report.data["empty_team_checks"] = empty;
  if (violation) {
    report.data["strict_violation"] = {
        {"formula", format(*violating)},
        {"structure", structure_to_json(violation->counterexample->structure)},
        {"team", team_to_json(violation->counterexample->teams.at(0))},
        {"restricted", team_to_json(violation->counterexample->teams.at(1))}};
  }
}

void suite_substitution(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  Rng rng(options.seed);
  const Signature sig({{"P", 1}, {"Q", 1}}, {{"f", 1}, {"c", 0}});
  FormulaGen gen;
  gen.functions = {{"f", 1}, {"c", 0}};
  gen.ops = {Op::kEq,  Op::kNeq, Op::kRel, Op::kNegRel, Op::kDep,    Op::kInc,
             Op::kExcl, Op::kIndep, Op::kAnd, Op::kOr,     Op::kExists, Op::kForall};
  const std::vector<Term> terms = {Term::var("y"), Term::apply("c"),
                                   Term::apply("f", {Term::var("y")}),
                                   Term::apply("f", {Term::var("x")})};
  std::uint64_t rejected = 0;
  while (tally.cases < 500) {
    const auto phi = random_formula(rng, gen);
    const auto& t = terms[pick(rng, terms.size())];
    Formula replaced;
    try {
      replaced = substitute(phi, t, "x");
    } catch (const Error&) {
      ++rejected;
      continue;
    }
    const std::size_t n = 1 + pick(rng, 3);
    const auto m = random_structure(rng, sig, n);
    const Team x = random_team(rng, {"x", "y"}, n, 1 + pick(rng, 4));
    const auto r = check_substitution(m, x, phi, t, "x", options.eval);
    tally.check(r.agree(), [&] {
      return format(phi) + " with " + to_string(t) + " for x on " + to_string(x);
    });
  }
  report.data["instances"] = tally.cases;
  report.data["rejected_atoms_over_x"] = rejected;
}

struct Family {
  std::vector<Structure> structures;
  std::vector<Team> xs;
  std::vector<Team> ys;
};

Family random_family(Rng& rng, std::size_t k, const std::vector<std::string>& vars,
                     std::size_t max_rows) {
  Family f;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t n = 1 + pick(rng, 3);
    f.structures.push_back(random_structure(rng, corpus_signature(), n));
    f.xs.push_back(random_team(rng, vars, n, pick(rng, max_rows + 1)));
    f.ys.push_back(random_team(rng, vars, n, pick(rng, max_rows + 1)));
  }
  return f;
}

void suite_ultraproduct(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  Json by_kind = Json::object();
  std::uint64_t premises = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(options.seed * 1000003 + i);
    const std::size_t k = 1 + pick(rng, 3);
    const std::vector<std::string> vars =
        pick(rng, 2) ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
    const auto fam = random_family(rng, k, vars, 3);
    const auto u = Ultrafilter::principal(k, pick(rng, k));
    LemmaInput in;
    in.structures = fam.structures;
    in.xs = fam.xs;
    in.ys = fam.ys;
    in.var = pick(rng, 2) ? "x" : "z";
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t n = fam.structures[j].size();
      in.elements.push_back(static_cast<Element>(pick(rng, n)));
      std::vector<std::vector<Element>> images;
      const bool single = pick(rng, 2) == 0;
      for (std::size_t r = 0; r < fam.xs[j].size(); ++r) {
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
      premises += r.side_premise;
      const auto key = to_string(kind);
      by_kind[key] = by_kind.value(key, 0) + 1;
      tally.check(r.holds && (!r.side_premise || r.side_holds), [&] {
        return key + " instance " + std::to_string(i) + ": " + r.detail;
      });
    }
  }
  report.data["instances"] = 200;
  report.data["checks_by_kind"] = by_kind;
  report.data["side_premises_met"] = premises;
}

void suite_los(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  Rng rng(options.seed);
  const auto corpus = full_corpus();
  std::uint64_t weak = 0, strong = 0, iso = 0;
  for (int family = 0; family < 100; ++family) {
    const std::size_t k = 1 + pick(rng, 3);
    const auto fam = random_family(rng, k, {"x", "y"}, 3);
    const auto u = Ultrafilter::principal(k, pick(rng, k));
    for (const auto& phi : corpus) {
      const auto rec = check_los(fam.structures, fam.xs, u, phi, options.eval);
      weak += rec.weak_claimed;
      strong += rec.strong_claimed;
      tally.check(rec.agree(), [&] { return format(phi) + " in family " + std::to_string(family); });
    }
    const auto check = check_principal_isomorphism(fam.structures, fam.xs, u);
    ++iso;
    tally.check(check.holds(), [&] { return "isomorphism fails in family " + std::to_string(family); });
  }
  report.data["families"] = 100;
  report.data["formulas"] = corpus.size();
  report.data["weak_eligible_checks"] = weak;
  report.data["strong_eligible_checks"] = strong;
  report.data["isomorphism_checks"] = iso;
}

void suite_eso(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  const auto sig = corpus_signature();
  std::uint64_t exhaustive = 0;
  std::uint64_t over_budget = 0;
  Json skipped = Json::array();
  for (const auto& phi : atom_corpus()) {
    const auto fv = free_var_list(phi);
    if (fv.size() > 2) continue;
    for (std::size_t n = 1; n <= 2; ++n) {
      if (eso_cells(phi, n) > options.eso.max_cells) {
        ++over_budget;
        skipped.push_back(format(phi) + " at n=" + std::to_string(n));
        continue;
      }
      for (const auto& m : all_structures(sig, n)) {
        const Team full = full_team(fv, n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << full.size()); ++mask) {
          const Team x = subteam(full, mask);
          const auto r = crosscheck(m, x, phi, fv, options.eso);
          ++exhaustive;
          tally.check(r.agree(), [&] { return format(phi) + " on " + to_string(x); });
        }
      }
    }
  }
  // A formula the budget excludes is an untested case, not a pass.
  tally.check(over_budget == 0, [&] { return "over the ESO budget: " + skipped.dump(); });

  Rng rng(options.seed);
  FormulaGen gen;
  gen.ops = {Op::kEq,  Op::kNeq, Op::kRel, Op::kNegRel, Op::kDep,    Op::kInc,
             Op::kExcl, Op::kIndep, Op::kAnd, Op::kOr,     Op::kExists, Op::kForall};
  std::uint64_t randomized = 0, resampled = 0;
  while (randomized < 300) {
    gen.free_vars = pick(rng, 2) ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
    gen.max_depth = 1 + pick(rng, 4);
    const auto phi = random_formula(rng, gen);
    if (power(3, gen.free_vars.size() + quantifier_nesting(phi)) > options.eso.max_cells) {
      ++resampled;
      continue;
    }
    const auto m = random_structure(rng, sig, 3);
    const Team x = random_team(rng, gen.free_vars, 3, pick(rng, 5));
    const auto r = crosscheck(m, x, phi, gen.free_vars, options.eso);
    ++randomized;
    tally.check(r.agree(), [&] { return format(phi) + " on " + to_string(x) + " (n=3)"; });
  }
  report.data["exhaustive_instances"] = exhaustive;
  report.data["randomized_instances"] = randomized;
  report.data["randomized_resampled_over_budget"] = resampled;
  report.data["max_cells"] = options.eso.max_cells;
}

void suite_intuition(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  Rng rng(options.seed);
  std::uint64_t expansions = 0, mutations = 0, crosschecked = 0;
  while (expansions < 100) {
    const auto inst = random_gamma_instance(rng, options.eso.max_cells);
    if (!inst) continue;
    ExpansionOptions eopts;
    eopts.eval = options.eval;
    eopts.eso = options.eso;
    const auto e = expand_model(inst->structure, inst->team, inst->gamma, eopts);
    ++expansions;
    for (const auto& c : e.crosschecks) crosschecked += c.has_value();
    tally.check(e.verified(), [&] { return "expansion of " + to_string(inst->team) + " not verified"; });

    const auto mutation = random_breaking_mutation(e.structure, inst->gamma, rng);
    const auto r = check_intuition(apply_mutation(e.structure, mutation), inst->gamma);
    ++mutations;
    tally.check(!r.models_delta && !r.conditions() && r.consistent(), [&] {
      return "mutation of " + mutation.symbol + " at " + Json(mutation.tuple).dump() +
             " gave models_delta=" + std::to_string(r.models_delta) + " conditions=" +
             std::to_string(r.cond1) + std::to_string(r.cond2) + std::to_string(r.cond3);
    });
  }
  report.data["expansions"] = expansions;
  report.data["mutations"] = mutations;
  report.data["crosschecked_formulas"] = crosschecked;
}

void suite_merge(const SuiteOptions& options, SuiteReport& report, Tally& tally) {
  Rng rng(options.seed);
  std::uint64_t trips = 0;
  while (trips < 100) {
    const auto inst = random_gamma_instance(rng, options.eso.max_cells);
    if (!inst) continue;
    ExpansionOptions eopts;
    eopts.eval = options.eval;
    eopts.crosscheck = false;
    const auto e = expand_model(inst->structure, inst->team, inst->gamma, eopts);
    const auto r = merge_teams(coherence_system(e.structure, inst->gamma));
    const auto& vars = inst->gamma.variables;
    ++trips;
    tally.check(r.verified && r.team && *r.team == restrict(inst->team, {vars.begin(), vars.end()}),
                [&] { return "round trip failed for " + to_string(inst->team); });
  }
  const auto fixture = merge_teams(triangle_system());
  tally.check(!fixture.verified && fixture.failure.has_value(),
              [] { return std::string("incomplete family merged without a failure witness"); });
  report.data["round_trips"] = trips;
  report.data["fixture"] = {{"verified", fixture.verified},
                            {"candidate", team_to_json(fixture.candidate)},
                            {"failure", fixture.failure ? index_set_string(*fixture.failure) : ""}};
}

using SuiteFn = void (*)(const SuiteOptions&, SuiteReport&, Tally&);

const std::vector<std::pair<SuiteInfo, SuiteFn>>& registry() {
  static const std::vector<std::pair<SuiteInfo, SuiteFn>> table = {
      {{"example", 1, "worked example: satisfiable pair, unsatisfiable with dep( ; x)", 10},
       suite_example},
      {{"flatness", 2, "flatness of first-order formulas", 60}, suite_flatness},
      {{"closure", 3, "closure properties and a strict locality violation", 300}, suite_closure},
      {{"substitution", 4, "substitution lemma on random instances", 60}, suite_substitution},
      {{"ultraproduct", 5, "team ultraproduct identities", 120}, suite_ultraproduct},
      {{"los", 6, "Łoś equivalence and principal isomorphism", 120}, suite_los},
      {{"eso", 7, "ESO translation cross-check", 600}, suite_eso},
      {{"intuition", 8, "coherence biconditional on expansions and mutations", 120},
       suite_intuition},
      {{"merge", 9, "merge round trip and incomplete family", 60}, suite_merge},
  };
  return table;
}

}  // namespace

const std::vector<SuiteInfo>& suite_catalog() {
  static const std::vector<SuiteInfo> out = [] {
    std::vector<SuiteInfo> v;
    for (const auto& entry : registry()) v.push_back(entry.first);
    return v;
  }();
  return out;
}

std::optional<SuiteInfo> find_suite(std::string_view name) {
  for (const auto& info : suite_catalog()) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

SuiteReport run_suite(std::string_view name, const SuiteOptions& options) {
  for (const auto& [info, fn] : registry()) {
    if (info.name != name) continue;
    SuiteReport report;
    report.info = info;
    report.seed = options.seed;
    report.data = Json::object();
    Tally tally;
    const auto start = std::chrono::steady_clock::now();
    fn(options, report, tally);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.cases = tally.cases;
    report.failures = tally.failures;
    report.correct = tally.failures == 0 && tally.cases > 0;
    if (!tally.first_failures.empty()) report.data["first_failures"] = tally.first_failures;
    report.detail = std::to_string(tally.cases) + " checks, " + std::to_string(tally.failures) +
                    " failures";
    return report;
  }
  throw Error(ErrorKind::kValidation, "unknown suite '" + std::string(name) + "'");
}

Json report_to_json(const SuiteReport& report) {
  Json out;
  out["suite"] = report.info.name;
  out["criterion"] = report.info.criterion;
  out["title"] = report.info.title;
  out["pass"] = report.pass();
  out["correct"] = report.correct;
  out["seconds"] = report.seconds;
  out["limit_seconds"] = report.info.limit_seconds;
  out["seed"] = report.seed;
  out["cases"] = report.cases;
  out["failures"] = report.failures;
  out["detail"] = report.detail;
  out["data"] = report.data;
  return out;
}

std::optional<GammaInstance> random_gamma_instance(Rng& rng, std::size_t max_cells) {
  const std::vector<std::string> pool = {"x", "y", "z"};
  FormulaGen gen;
  gen.bound_vars = {"u", "w"};
  gen.ops = {Op::kEq,  Op::kNeq, Op::kRel, Op::kNegRel, Op::kDep,    Op::kInc,
             Op::kExcl, Op::kIndep, Op::kAnd, Op::kOr,     Op::kExists, Op::kForall};
  gen.max_depth = 3;
  for (int attempt = 0; attempt < 50; ++attempt) {
    const std::size_t kappa = 1 + pick(rng, 3);
    gen.free_vars.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(kappa));
    std::vector<Formula> gamma;
    for (std::size_t k = 0, count = 1 + pick(rng, 2); k < count; ++k) {
      gamma.push_back(random_formula(rng, gen));
    }
    std::size_t n = 3;
    auto fits = [&](std::size_t size) {
      return std::all_of(gamma.begin(), gamma.end(),
                         [&](const Formula& phi) { return eso_cells(phi, size) <= max_cells; });
    };
    while (n > 1 && !fits(n)) --n;
    if (!fits(n)) continue;
    const auto m = random_structure(rng, corpus_signature(), n);
    for (int t = 0; t < 40; ++t) {
      const Team y = random_team(rng, gen.free_vars, n, 1 + pick(rng, 6));
      if (y.empty()) continue;
      const bool ok = std::all_of(gamma.begin(), gamma.end(),
                                  [&](const Formula& phi) { return eval(m, y, phi); });
      if (ok) return GammaInstance{m, y, GammaSpec::make(gamma, gen.free_vars)};
    }
  }
  return std::nullopt;
}

CoherenceSystem triangle_system() {
  CoherenceSystem s{{"x0", "x1", "x2"}, 2, {}};
  const Relation both(1, {{0}, {1}});
  const Relation equal(2, {{0, 0}, {1, 1}});
  s.family = {{0, Relation(0, {{}})}, {1, both},  {2, both}, {4, both},
              {3, equal},             {6, equal}, {5, Relation(2, {{0, 1}, {1, 0}})}};
  return s;
}

}  // namespace teamlog
