#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "teamlog/cli.hpp"
#include "teamlog/compactness.hpp"
#include "teamlog/errors.hpp"
#include "teamlog/eso.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/io.hpp"
#include "teamlog/parser.hpp"
#include "teamlog/suites.hpp"

namespace py = pybind11;
using namespace teamlog;

namespace {

// Values cross the boundary as JSON text; the Python layer does the dict conversion.
Structure structure_arg(const std::string& text) { return structure_from_json(Json::parse(text)); }

Team team_arg(const std::string& text, const Structure& m) {
  return team_from_json(Json::parse(text), m.size());
}

ParseOptions parse_options(const Signature* signature, bool strict) {
  ParseOptions p;
  p.signature = signature;
  p.strict = strict;
  return p;
}

std::string eval_json(const std::string& structure, const std::string& team,
                      const std::string& formula, bool strict, bool prune) {
  const auto m = structure_arg(structure);
  const auto x = team_arg(team, m);
  const auto phi = parse(formula, parse_options(&m.signature(), strict));
  EvalOptions opt;
  opt.prune = prune;
  const auto r = eval_with_certificate(m, x, phi, opt);
  return Json{{"formula", format(phi)}, {"value", r.value}, {"calls", r.stats.calls}}.dump();
}

std::string sat_json(const std::vector<std::string>& formulas, std::size_t max_n, bool strict) {
  std::vector<Formula> gamma;
  for (const auto& f : formulas) gamma.push_back(parse(f, parse_options(nullptr, strict)));
  const auto r = sat_search(gamma, infer_signature(gamma), max_n);
  Json out{{"satisfiable", r.found},
           {"structures_checked", r.structures_checked},
           {"teams_checked", r.teams_checked}};
  if (r.found) {
    out["structure"] = structure_to_json(*r.structure);
    out["team"] = team_to_json(*r.team);
  }
  return out.dump();
}

std::string translate_json(const std::string& formula, const std::vector<std::string>& vars) {
  const auto phi = parse(formula);
  const auto chi = translate(phi, vars.empty() ? free_var_list(phi) : vars);
  Json prefix = Json::array();
  for (const auto& d : chi.prefix) prefix.push_back({{"name", d.name}, {"arity", d.arity}});
  return Json{{"sentence", to_string(chi)}, {"prefix", prefix}, {"team_vars", chi.team_vars}}.dump();
}

std::string crosscheck_json(const std::string& structure, const std::string& team,
                            const std::string& formula) {
  const auto m = structure_arg(structure);
  const auto x = team_arg(team, m);
  const auto r = crosscheck(m, x, parse(formula, parse_options(&m.signature(), false)));
  return Json{{"direct", r.direct}, {"via_eso", r.via_eso}, {"agree", r.agree()}}.dump();
}

std::string merge_json(const std::string& system) {
  const auto sys = coherence_system_from_json(Json::parse(system));
  const auto r = merge_teams(sys);
  Json out{{"verified", r.verified}, {"candidate", team_to_json(r.candidate)}};
  out["team"] = r.team ? team_to_json(*r.team) : Json(nullptr);
  if (r.failure) {
    Json idx = Json::array();
    for (std::size_t i = 0; i < sys.variables.size(); ++i) {
      if ((*r.failure >> i) & 1U) idx.push_back(i);
    }
    out["failure"] = idx;
  } else {
    out["failure"] = nullptr;
  }
  return out.dump();
}

std::string suite_json(const std::string& name, std::uint64_t seed) {
  SuiteOptions so;
  so.seed = seed;
  auto report = report_to_json(run_suite(name, so));
  return report.dump();
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str());
}

}  // namespace

PYBIND11_MODULE(_teamlog, m) {
  m.doc() = "Team semantics evaluator and model-theoretic checks";

  static py::exception<Error> error(m, "TeamlogError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object args = py::make_tuple(std::string(to_string(e.kind())), std::string(e.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    } catch (const Json::exception& e) {
      py::object args = py::make_tuple(std::string("io"), std::string(e.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def("format_formula", [](const std::string& text, bool strict) {
    return format(parse(text, parse_options(nullptr, strict)));
  }, py::arg("text"), py::arg("strict") = false);
  m.def("eval_json", &eval_json, py::arg("structure"), py::arg("team"), py::arg("formula"),
        py::arg("strict") = false, py::arg("prune") = true);
  m.def("sat_json", &sat_json, py::arg("formulas"), py::arg("max_n") = 3, py::arg("strict") = false);
  m.def("translate_json", &translate_json, py::arg("formula"),
        py::arg("vars") = std::vector<std::string>{});
  m.def("crosscheck_json", &crosscheck_json, py::arg("structure"), py::arg("team"), py::arg("formula"));
  m.def("merge_json", &merge_json, py::arg("system"));
  m.def("suite_json", &suite_json, py::arg("name"), py::arg("seed") = 7);
  m.def("suite_names", [] {
    std::vector<std::string> out;
    for (const auto& s : suite_catalog()) out.push_back(s.name);
    return out;
  });
  m.def("cli", &cli, py::arg("args"), "Runs one command; returns (exit code, JSON text).");
}
