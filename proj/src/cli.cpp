#include "teamlog/cli.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "teamlog/compactness.hpp"
#include "teamlog/errors.hpp"
#include "teamlog/eso.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/io.hpp"
#include "teamlog/parser.hpp"
#include "teamlog/properties.hpp"
#include "teamlog/suites.hpp"
#include "teamlog/ultraproduct.hpp"

namespace teamlog {

namespace {

struct Common {
  std::uint64_t seed = 7;
  std::uint64_t max_calls = 0;
  std::size_t max_rows = 16;
  bool no_prune = false;
  bool strict = false;
  std::size_t max_cells = 16;
  std::uint64_t max_nodes = std::uint64_t{1} << 24;

  EvalOptions eval() const {
    EvalOptions o;
    o.max_calls = max_calls;
    o.max_split_rows = max_rows;
    o.prune = !no_prune;
    return o;
  }
  EsoOptions eso() const { return EsoOptions{max_cells, max_nodes}; }
  ParseOptions parse(const Signature* signature = nullptr) const {
    ParseOptions p;
    p.signature = signature;
    p.strict = strict;
    return p;
  }
  Json budgets() const {
    return Json{{"max_calls", max_calls},
                {"max_split_rows", max_rows},
                {"prune", !no_prune},
                {"eso_max_cells", max_cells},
                {"eso_max_nodes", max_nodes}};
  }
};

void add_eval_flags(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for randomized steps");
  app->add_option("--max-calls", c.max_calls, "Evaluation call budget (TEAMLOG_BUDGET)");
  app->add_option("--max-rows", c.max_rows, "Largest team for subteam searches");
  app->add_flag("--no-prune", c.no_prune, "Search every clause exactly as defined");
  app->add_flag("--strict", c.strict, "Read v and E as their strict versions");
}

void add_eso_flags(CLI::App* app, Common& c) {
  app->add_option("--max-cells", c.max_cells, "Cells per ESO relation variable");
  app->add_option("--max-nodes", c.max_nodes, "ESO search nodes");
}

std::string cert_kind(Certificate::Kind kind) {
  switch (kind) {
    case Certificate::Kind::kCover: return "cover";
    case Certificate::Kind::kSupplement: return "supplement";
    case Certificate::Kind::kElement: return "element";
    case Certificate::Kind::kNone: break;
  }
  return "none";
}

Json certificate_to_json(const Certificate& c, const Team& team) {
  Json out{{"kind", cert_kind(c.kind)}};
  if (c.kind == Certificate::Kind::kCover) {
    out["left"] = team_to_json(c.left);
    out["right"] = team_to_json(c.right);
  } else if (c.kind == Certificate::Kind::kSupplement) {
    out["var"] = c.var;
    Json rows = Json::array();
    for (std::size_t r = 0; r < c.images.size() && r < team.size(); ++r) {
      rows.push_back({{"row", team.rows()[r]}, {"images", c.images[r]}});
    }
    out["images"] = rows;
  } else if (c.kind == Certificate::Kind::kElement) {
    out["var"] = c.var;
    out["element"] = c.element;
  }
  return out;
}

Json counterexample_to_json(const Counterexample& ce) {
  Json teams = Json::array();
  for (const auto& t : ce.teams) teams.push_back(team_to_json(t));
  return Json{{"structure", structure_to_json(ce.structure)}, {"teams", teams}, {"note", ce.note}};
}

Json index_list(IndexSet set, std::size_t count) {
  Json out = Json::array();
  for (std::size_t i = 0; i < count; ++i) {
    if ((set >> i) & 1U) out.push_back(i);
  }
  return out;
}

std::vector<Structure> load_structures(const std::vector<std::string>& paths) {
  std::vector<Structure> out;
  for (const auto& p : paths) out.push_back(load_structure(p));
  return out;
}

std::vector<Team> load_teams(const std::vector<std::string>& paths,
                             const std::vector<Structure>& structures) {
  if (paths.size() != structures.size()) {
    throw Error(ErrorKind::kShape, "expected " + std::to_string(structures.size()) +
                                       " team files, got " + std::to_string(paths.size()));
  }
  std::vector<Team> out;
  for (std::size_t i = 0; i < paths.size(); ++i) out.push_back(load_team(paths[i], structures[i].size()));
  return out;
}

Ultrafilter principal_at(std::size_t count, std::size_t principal) {
  if (principal >= count) {
    throw Error(ErrorKind::kValidation, "principal index " + std::to_string(principal) +
                                            " outside 0.." + std::to_string(count - 1));
  }
  return Ultrafilter::principal(count, principal);
}

Json ultrafilter_to_json(const Ultrafilter& u) {
  Json members = Json::array();
  for (auto m : u.members()) members.push_back(index_list(m, u.index_count()));
  return Json{{"indices", u.index_count()}, {"principal", u.generator()}, {"members", members}};
}

std::vector<std::string> gamma_vars(const std::vector<Formula>& formulas,
                                    const std::vector<std::string>& given) {
  if (!given.empty()) return given;
  const auto fv = free_vars(formulas);
  return {fv.begin(), fv.end()};
}

Json record_to_json(const IntuitionRecord& r) {
  return Json{{"models_delta", r.models_delta},
              {"cond1", r.cond1},
              {"cond2", r.cond2},
              {"cond3", r.cond3},
              {"consistent", r.consistent()}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Team semantics workbench: evaluation, closure checks, ultraproducts, ESO, compactness"};
  app.name("teamlog");
  app.require_subcommand(1);
  Common c;
  c.max_calls = default_call_budget();

  int code = kExitTrue;
  Json report;
  std::function<void()> action;
  auto finish = [&](const char* command, Json body) {
    Json full{{"command", command}, {"seed", c.seed}, {"budgets", c.budgets()}};
    for (auto& [k, v] : body.items()) full[k] = v;
    report = std::move(full);
  };

  // eval
  auto* ev = app.add_subcommand("eval", "Decide M |=_X phi");
  std::string m_path, t_path, f_text;
  bool want_cert = false;
  ev->add_option("-m,--structure", m_path, "Structure JSON")->required();
  ev->add_option("-t,--team", t_path, "Team JSON")->required();
  ev->add_option("-f,--formula", f_text, "Formula")->required();
  ev->add_flag("--certificate", want_cert, "Print the witness for the root connective");
  add_eval_flags(ev, c);
  ev->callback([&] {
    action = [&] {
      const auto m = load_structure(m_path);
      const auto x = load_team(t_path, m.size());
      const auto phi = parse(f_text, c.parse(&m.signature()));
      const auto result = eval_with_certificate(m, x, phi, c.eval());
      Json body{{"formula", format(phi)},
                {"value", result.value},
                {"stats", {{"calls", result.stats.calls}, {"memo_hits", result.stats.memo_hits}}}};
      if (want_cert) {
        body["certificate"] = result.value ? certificate_to_json(result.certificate, x) : Json(nullptr);
      }
      finish("eval", body);
      code = result.value ? kExitTrue : kExitFalse;
    };
  });

  // sat
  auto* st = app.add_subcommand("sat", "Search small models of a finite set of formulas");
  std::vector<std::string> f_list;
  std::string f_file;
  std::size_t max_n = 3;
  st->add_option("-f,--formula", f_list, "Formula (repeatable)");
  st->add_option("--file", f_file, "Formula file, one per line");
  st->add_option("--max-n", max_n, "Largest domain size")->check(CLI::Range(1, 8));
  add_eval_flags(st, c);
  st->callback([&] {
    action = [&] {
      std::vector<Formula> gamma;
      for (const auto& text : f_list) gamma.push_back(parse(text, c.parse()));
      if (!f_file.empty()) {
        for (auto& phi : load_formulas(f_file, c.parse())) gamma.push_back(std::move(phi));
      }
      if (gamma.empty()) throw Error(ErrorKind::kValidation, "no formulas given");
      const auto sig = infer_signature(gamma);
      const auto r = sat_search(gamma, sig, max_n, c.eval());
      Json formulas = Json::array();
      for (const auto& phi : gamma) formulas.push_back(format(phi));
      Json body{{"formulas", formulas},
                {"max_n", max_n},
                {"satisfiable", r.found},
                {"structures_checked", r.structures_checked},
                {"teams_checked", r.teams_checked}};
      if (r.found) {
        body["structure"] = structure_to_json(*r.structure);
        body["team"] = team_to_json(*r.team);
      }
      finish("sat", body);
      code = r.found ? kExitTrue : kExitFalse;
    };
  });

  // props
  auto* pr = app.add_subcommand("props", "Check closure properties on one structure");
  std::vector<std::string> checks{"empty-team", "downward", "union", "flatness", "locality"};
  std::vector<std::string> p_vars;
  PropertyOptions popt;
  pr->add_option("-m,--structure", m_path, "Structure JSON")->required();
  pr->add_option("-f,--formula", f_text, "Formula")->required();
  pr->add_option("--check", checks, "empty-team,downward,union,flatness,locality")
      ->delimiter(',')
      ->check(CLI::IsMember({"empty-team", "downward", "union", "flatness", "locality"}));
  pr->add_option("--vars", p_vars, "Team domain (default: free variables)")->delimiter(',');
  pr->add_option("--trials", popt.trials, "Random candidates beyond the exhaustive budget");
  pr->add_option("--budget", popt.budget, "Team evaluations for an exhaustive run");
  pr->add_flag("--force", popt.force, "Run the empty-team check outside its fragment");
  add_eval_flags(pr, c);
  pr->callback([&] {
    action = [&] {
      const auto m = load_structure(m_path);
      const auto phi = parse(f_text, c.parse(&m.signature()));
      popt.eval = c.eval();
      popt.seed = c.seed;
      auto domain = p_vars.empty() ? free_var_list(phi) : p_vars;
      std::sort(domain.begin(), domain.end());
      Json verdicts = Json::array();
      bool all = true;
      for (const auto& name : checks) {
        PropertyVerdict v;
        if (name == "empty-team") {
          v = check_empty_team(m, phi, popt);
        } else if (name == "downward") {
          v = check_downward(m, phi, domain, popt);
        } else if (name == "union") {
          v = check_union_closure(m, phi, domain, popt);
        } else if (name == "flatness") {
          v = check_flatness(m, phi, domain, popt);
        } else {
          auto wide = domain;
          if (p_vars.empty()) {
            std::string extra = "u";
            for (int k = 1; std::find(wide.begin(), wide.end(), extra) != wide.end(); ++k) {
              extra = "u" + std::to_string(k);
            }
            wide.push_back(extra);
            std::sort(wide.begin(), wide.end());
          }
          v = check_locality(m, phi, wide, popt);
        }
        all = all && v.holds;
        Json j{{"property", v.property},
               {"holds", v.holds},
               {"coverage", v.coverage == Coverage::kExhaustive ? "exhaustive" : "randomized"},
               {"checked", v.checked},
               {"seed", v.seed},
               {"trials", v.trials}};
        if (v.counterexample) {
          j["counterexample"] = counterexample_to_json(*v.counterexample);
          j["reverified"] = reverify(v, phi, c.eval());
        }
        verdicts.push_back(j);
      }
      finish("props", Json{{"formula", format(phi)}, {"domain", domain}, {"verdicts", verdicts}});
      code = all ? kExitTrue : kExitFalse;
    };
  });

  // up
  auto* up = app.add_subcommand("up", "Ultraproducts over a finite index set");
  up->require_subcommand(0, 1);
  std::vector<std::string> s_paths, t_paths, y_paths;
  std::size_t indices = 0, principal = 0;
  up->add_option("--indices", indices, "Number of indices (defaults to the structure count)");
  up->add_option("--principal", principal, "Generator of the principal ultrafilter");
  up->add_option("--structures", s_paths, "Structure JSON per index");
  up->add_option("--teams", t_paths, "Team JSON per index");
  add_eval_flags(up, c);
  up->callback([&] {
    if (!up->get_subcommands().empty()) return;
    action = [&] {
      if (s_paths.empty()) throw Error(ErrorKind::kValidation, "up needs --structures");
      const auto ms = load_structures(s_paths);
      if (indices != 0 && indices != ms.size()) {
        throw Error(ErrorKind::kShape, "--indices does not match the number of structures");
      }
      const auto u = principal_at(ms.size(), principal);
      const auto product = product_structure(ms, u);
      Json body{{"ultrafilter", ultrafilter_to_json(u)},
                {"product_size", product.class_of.size()},
                {"structure", structure_to_json(product.structure)},
                {"representatives", product.representative}};
      if (!t_paths.empty()) {
        const auto xs = load_teams(t_paths, ms);
        body["team"] = team_to_json(team_ultraproduct(product, xs, u));
      }
      finish("up", body);
    };
  });

  auto* lem = up->add_subcommand("check-lemma", "One team identity, both sides");
  std::string kind_text, var, images_path;
  std::vector<Element> elements;
  lem->add_option("--kind", kind_text, "union|disjointness|const-supplement|duplicate|supplement")
      ->required();
  lem->add_option("--structures", s_paths, "Structure JSON per index")->required();
  lem->add_option("--teams", t_paths, "Team JSON per index")->required();
  lem->add_option("--ys", y_paths, "Second team per index (union, disjointness)");
  lem->add_option("--var", var, "Variable for the supplement kinds");
  lem->add_option("--elements", elements, "Constant per index (const-supplement)")->delimiter(',');
  lem->add_option("--images", images_path, "JSON: per index, per row, the image set (supplement)");
  lem->add_option("--principal", principal, "Generator of the principal ultrafilter");
  lem->callback([&] {
    action = [&] {
      const auto kind = lemma_kind_from_string(kind_text);
      if (!kind) throw Error(ErrorKind::kValidation, "unknown lemma kind '" + kind_text + "'");
      LemmaInput in;
      in.structures = load_structures(s_paths);
      in.xs = load_teams(t_paths, in.structures);
      if (!y_paths.empty()) in.ys = load_teams(y_paths, in.structures);
      in.var = var;
      in.elements = Tuple(elements.begin(), elements.end());
      if (!images_path.empty()) {
        const auto j = read_json_file(images_path);
        try {
          in.images = j.get<std::vector<std::vector<std::vector<Element>>>>();
        } catch (const Json::exception& e) {
          throw Error(ErrorKind::kIo, std::string("malformed images: ") + e.what());
        }
      }
      const auto u = principal_at(in.structures.size(), principal);
      const auto r = check_team_lemma(in, *kind, u);
      finish("up check-lemma", Json{{"kind", to_string(r.kind)},
                                    {"holds", r.holds},
                                    {"lhs", team_to_json(r.lhs)},
                                    {"rhs", team_to_json(r.rhs)},
                                    {"side_premise", r.side_premise},
                                    {"side_holds", r.side_holds},
                                    {"detail", r.detail}});
      code = r.holds ? kExitTrue : kExitFalse;
    };
  });

  auto* los = up->add_subcommand("check-los", "Satisfaction in the product against U-many factors");
  los->add_option("-f,--formula", f_text, "Formula")->required();
  los->add_option("--structures", s_paths, "Structure JSON per index")->required();
  los->add_option("--teams", t_paths, "Team JSON per index")->required();
  los->add_option("--principal", principal, "Generator of the principal ultrafilter");
  add_eval_flags(los, c);
  los->callback([&] {
    action = [&] {
      const auto ms = load_structures(s_paths);
      const auto xs = load_teams(t_paths, ms);
      const auto phi = parse(f_text, c.parse(&ms.at(0).signature()));
      const auto u = principal_at(ms.size(), principal);
      const auto r = check_los(ms, xs, u, phi, c.eval());
      const auto iso = check_principal_isomorphism(ms, xs, u);
      finish("up check-los",
             Json{{"formula", format(phi)},
                  {"satisfied", index_list(r.satisfied, ms.size())},
                  {"lhs", r.lhs},
                  {"rhs", r.rhs},
                  {"agree", r.agree()},
                  {"weak_claimed", r.weak_claimed},
                  {"strong_claimed", r.strong_claimed},
                  {"isomorphism",
                   {{"bijective", iso.bijective},
                    {"relations", iso.relations},
                    {"functions", iso.functions},
                    {"team", iso.team},
                    {"holds", iso.holds()}}}});
      code = r.agree() && iso.holds() ? kExitTrue : kExitFalse;
    };
  });

  // translate
  auto* tr = app.add_subcommand("translate", "Print the ESO translation");
  std::vector<std::string> v_list;
  tr->add_option("-f,--formula", f_text, "Formula")->required();
  tr->add_option("--vars", v_list, "Team variables (default: free variables)")->delimiter(',');
  add_eval_flags(tr, c);
  tr->callback([&] {
    action = [&] {
      const auto phi = parse(f_text, c.parse());
      const auto vars = v_list.empty() ? free_var_list(phi) : v_list;
      const auto chi = translate(phi, vars);
      Json prefix = Json::array();
      for (const auto& d : chi.prefix) prefix.push_back({{"name", d.name}, {"arity", d.arity}});
      finish("translate", Json{{"formula", format(phi)},
                               {"team_predicate", chi.team_predicate},
                               {"team_vars", chi.team_vars},
                               {"prefix", prefix},
                               {"sentence", to_string(chi)}});
    };
  });

  // crosscheck
  auto* cc = app.add_subcommand("crosscheck", "Compare the evaluator with the ESO translation");
  cc->add_option("-m,--structure", m_path, "Structure JSON")->required();
  cc->add_option("-t,--team", t_path, "Team JSON")->required();
  cc->add_option("-f,--formula", f_text, "Formula")->required();
  cc->add_option("--vars", v_list, "Team variables (default: the team's)")->delimiter(',');
  add_eval_flags(cc, c);
  add_eso_flags(cc, c);
  cc->callback([&] {
    action = [&] {
      const auto m = load_structure(m_path);
      const auto x = load_team(t_path, m.size());
      const auto phi = parse(f_text, c.parse(&m.signature()));
      const auto r = crosscheck(m, x, phi, v_list, c.eso());
      finish("crosscheck", Json{{"formula", format(phi)},
                                {"direct", r.direct},
                                {"via_eso", r.via_eso},
                                {"agree", r.agree()}});
      code = r.agree() ? kExitTrue : kExitFalse;
    };
  });

  // delta
  auto* de = app.add_subcommand("delta", "Compactness construction for a finite set of formulas");
  de->require_subcommand(0, 1);
  std::string gamma_file;
  de->add_option("-f,--formulas", gamma_file, "Formula file, one per line");
  de->add_option("--vars", v_list, "Enumeration x_0.. (default: sorted free variables)")->delimiter(',');
  de->add_option("-m,--structure", m_path, "Structure JSON giving the base vocabulary");
  add_eval_flags(de, c);
  de->callback([&] {
    if (!de->get_subcommands().empty()) return;
    action = [&] {
      if (gamma_file.empty()) throw Error(ErrorKind::kValidation, "delta needs -f formulas.txt");
      std::optional<Structure> base;
      if (!m_path.empty()) base = load_structure(m_path);
      const auto formulas = load_formulas(gamma_file, c.parse(base ? &base->signature() : nullptr));
      const auto gamma = GammaSpec::make(formulas, gamma_vars(formulas, v_list));
      const auto sig = base ? base->signature() : infer_signature(formulas);
      const auto delta = build_delta_gamma(gamma, sig);
      Json sentences = Json::array();
      for (std::size_t i = 0; i < delta.sentences.size(); ++i) {
        sentences.push_back({{"schema", delta.schema[i]}, {"text", to_string(delta.sentences[i])}});
      }
      Json added = Json::array();
      for (const auto& r : delta.signature.relations()) {
        if (!sig.relation_index(r.name)) added.push_back({{"name", r.name}, {"arity", r.arity}});
      }
      finish("delta", Json{{"variables", gamma.variables},
                           {"symbols", added},
                           {"count", delta.sentences.size()},
                           {"sentences", sentences}});
    };
  });

  auto* dc = de->add_subcommand("check", "Evaluate the construction on an expanded structure");
  dc->add_option("-m,--structure", m_path, "Expanded structure JSON")->required();
  dc->add_option("-f,--formulas", gamma_file, "Formula file, one per line")->required();
  dc->add_option("--vars", v_list, "Enumeration x_0..")->delimiter(',');
  dc->callback([&] {
    action = [&] {
      const auto m = load_structure(m_path);
      const auto formulas = load_formulas(gamma_file, c.parse(&m.signature()));
      const auto gamma = GammaSpec::make(formulas, gamma_vars(formulas, v_list));
      const auto r = check_intuition(m, gamma);
      finish("delta check", record_to_json(r));
      code = r.models_delta ? kExitTrue : kExitFalse;
    };
  });

  auto* dx = de->add_subcommand("expand", "Expand a model of the formulas by its team");
  std::string out_path;
  bool no_cross = false;
  dx->add_option("-m,--structure", m_path, "Structure JSON")->required();
  dx->add_option("-t,--team", t_path, "Team JSON")->required();
  dx->add_option("-f,--formulas", gamma_file, "Formula file, one per line")->required();
  dx->add_option("--vars", v_list, "Enumeration x_0..")->delimiter(',');
  dx->add_option("-o,--output", out_path, "Write the expanded structure here");
  dx->add_flag("--no-crosscheck", no_cross, "Skip the ESO cross-check of each formula");
  add_eso_flags(dx, c);
  dx->callback([&] {
    action = [&] {
      const auto m = load_structure(m_path);
      const auto y = load_team(t_path, m.size());
      const auto formulas = load_formulas(gamma_file, c.parse(&m.signature()));
      const auto gamma = GammaSpec::make(formulas, gamma_vars(formulas, v_list));
      ExpansionOptions eo;
      eo.eval = c.eval();
      eo.crosscheck = !no_cross;
      eo.eso = c.eso();
      const auto e = expand_model(m, y, gamma, eo);
      Json cross = Json::array();
      for (const auto& cr : e.crosschecks) {
        cross.push_back(cr ? Json{{"direct", cr->direct}, {"via_eso", cr->via_eso}} : Json(nullptr));
      }
      Json body{{"intuition", record_to_json(e.intuition)},
                {"crosschecks", cross},
                {"verified", e.verified()}};
      if (out_path.empty()) {
        body["structure"] = structure_to_json(e.structure);
      } else {
        save_structure(out_path, e.structure);
        body["written"] = out_path;
      }
      finish("delta expand", body);
      code = e.verified() ? kExitTrue : kExitFalse;
    };
  });

  auto* dm = de->add_subcommand("merge", "Merge a coherent family of projections");
  std::string sys_path;
  dm->add_option("-s,--system", sys_path, "Coherence system JSON")->required();
  dm->callback([&] {
    action = [&] {
      const auto sys = coherence_system_from_json(read_json_file(sys_path));
      const auto r = merge_teams(sys);
      Json body{{"verified", r.verified}, {"candidate", team_to_json(r.candidate)}};
      body["team"] = r.team ? team_to_json(*r.team) : Json(nullptr);
      if (r.failure) {
        Json idx = Json::array();
        Json vars = Json::array();
        for (std::size_t i = 0; i < sys.variables.size(); ++i) {
          if ((*r.failure >> i) & 1U) {
            idx.push_back(i);
            vars.push_back(sys.variables[i]);
          }
        }
        body["failure"] = {{"index", idx}, {"vars", vars}};
      } else {
        body["failure"] = nullptr;
      }
      finish("delta merge", body);
      code = r.verified ? kExitTrue : kExitFalse;
    };
  });

  // suite
  auto* su = app.add_subcommand("suite", "Run acceptance suites");
  std::string suite_name = "all";
  su->add_option("--name", suite_name, "Suite name or 'all'");
  add_eval_flags(su, c);
  add_eso_flags(su, c);
  su->callback([&] {
    action = [&] {
      SuiteOptions so;
      so.seed = c.seed;
      so.eval = c.eval();
      so.eso = c.eso();
      std::vector<std::string> names;
      if (suite_name == "all") {
        for (const auto& s : suite_catalog()) names.push_back(s.name);
      } else {
        names.push_back(suite_name);
      }
      Json reports = Json::array();
      bool all = true;
      for (const auto& name : names) {
        const auto r = run_suite(name, so);
        all = all && r.pass();
        reports.push_back(report_to_json(r));
      }
      finish("suite", Json{{"pass", all}, {"reports", reports}});
      code = all ? kExitTrue : kExitFalse;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitTrue;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitTrue;
  } catch (const CLI::ParseError& e) {
    out << Json{{"error", {{"kind", "usage"}, {"detail", e.what()}}}}.dump(2) << "\n";
    err << app.help();
    return kExitError;
  }

  try {
    if (!action) throw Error(ErrorKind::kValidation, "nothing to do");
    action();
  } catch (const Error& e) {
    out << error_json(e.kind(), e.what()).dump(2) << "\n";
    return e.kind() == ErrorKind::kBudget ? kExitBudget : kExitError;
  } catch (const std::exception& e) {
    out << Json{{"error", {{"kind", "internal"}, {"detail", e.what()}}}}.dump(2) << "\n";
    return kExitError;
  }
  out << report.dump(2) << "\n";
  return code;
}

}  // namespace teamlog
