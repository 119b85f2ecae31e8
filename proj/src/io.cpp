#include "teamlog/io.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "teamlog/errors.hpp"

namespace teamlog {

namespace {

std::string tuple_key(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(t[i]);
  }
  return out + ")";
}

Tuple parse_tuple_key(const std::string& key, const std::string& symbol) {
  auto fail = [&] {
    return Error(ErrorKind::kValidation,
                 "function '" + symbol + "': malformed argument key '" + key + "'");
  };
  if (key.size() < 2 || key.front() != '(' || key.back() != ')') throw fail();
  Tuple out;
  std::string body = key.substr(1, key.size() - 2);
  if (body.find_first_not_of(' ') == std::string::npos) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw fail();
    item = item.substr(b, e - b + 1);
    if (item.find_first_not_of("0123456789") != std::string::npos) throw fail();
    out.push_back(static_cast<Element>(std::stoul(item)));
  }
  return out;
}

void check_element(std::uint64_t v, std::size_t n, const std::string& where) {
  if (v >= n) {
    throw Error(ErrorKind::kValidation, where + ": element " + std::to_string(v) +
                                            " outside domain of size " + std::to_string(n));
  }
}

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kIo, std::string("malformed ") + what + ": " + e.what());
  }
}

Tuple tuple_from_json(const Json& row) {
  Tuple t;
  for (const auto& v : row) t.push_back(v.get<Element>());
  return t;
}

}  // namespace

Json relation_to_json(const Relation& relation) {
  Json rows = Json::array();
  for (const auto& t : relation.tuples()) rows.push_back(t);
  return rows;
}

Json structure_to_json(const Structure& structure) {
  const auto& sig = structure.signature();
  Json out;
  out["domain"] = structure.size();
  Json relations = Json::object();
  Json arities = Json::object();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    relations[sig.relations()[r].name] = relation_to_json(structure.relation(r));
    arities[sig.relations()[r].name] = sig.relations()[r].arity;
  }
  Json functions = Json::object();
  Json constants = Json::object();
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& decl = sig.functions()[f];
    const auto& table = structure.function_table(f);
    if (decl.arity == 0) {
      constants[decl.name] = table.at(0);
      continue;
    }
    Json entries = Json::object();
    for (std::size_t c = 0; c < table.size(); ++c) {
      entries[tuple_key(structure.tuple_at(c, decl.arity))] = table[c];
    }
    functions[decl.name] = entries;
  }
  out["relations"] = relations;
  out["functions"] = functions;
  out["constants"] = constants;
  out["arities"] = arities;
  return out;
}

Structure structure_from_json(const Json& json) {
  return guarded("structure", [&] {
    if (!json.is_object() || !json.contains("domain")) {
      throw Error(ErrorKind::kIo, "structure must be an object with a \"domain\" field");
    }
    const auto n = json.at("domain").get<std::int64_t>();
    if (n <= 0) throw Error(ErrorKind::kValidation, "domain size must be positive");
    const Json empty = Json::object();
    const auto& rels = json.contains("relations") ? json.at("relations") : empty;
    const auto& funs = json.contains("functions") ? json.at("functions") : empty;
    const auto& consts = json.contains("constants") ? json.at("constants") : empty;
    const auto& arities = json.contains("arities") ? json.at("arities") : empty;

    std::vector<SymbolDecl> rel_decls;
    for (const auto& [name, rows] : rels.items()) {
      std::size_t arity = 0;
      if (arities.contains(name)) {
        arity = arities.at(name).get<std::size_t>();
      } else if (!rows.empty()) {
        arity = rows.at(0).size();
      } else {
        throw Error(ErrorKind::kValidation,
                    "cannot infer the arity of empty relation '" + name + "'; list it under \"arities\"");
      }
      rel_decls.push_back({name, arity});
    }
    std::vector<SymbolDecl> fun_decls;
    for (const auto& [name, entries] : funs.items()) {
      if (!entries.is_object()) {
        throw Error(ErrorKind::kIo, "function '" + name + "' must map argument keys to values");
      }
      std::size_t arity = 0;
      if (!entries.empty()) arity = parse_tuple_key(entries.begin().key(), name).size();
      else throw Error(ErrorKind::kValidation, "function not total: '" + name + "' has no entries");
      fun_decls.push_back({name, arity});
    }
    for (const auto& [name, value] : consts.items()) fun_decls.push_back({name, 0});

    Structure s(Signature(rel_decls, fun_decls), static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < rel_decls.size(); ++r) {
      const auto& rows = rels.at(rel_decls[r].name);
      std::size_t k = 0;
      for (const auto& row : rows) {
        const auto t = tuple_from_json(row);
        const auto where = "relation '" + rel_decls[r].name + "' tuple " + std::to_string(k);
        if (t.size() != rel_decls[r].arity) {
          throw Error(ErrorKind::kValidation, where + " has " + std::to_string(t.size()) +
                                                  " entries, expected " +
                                                  std::to_string(rel_decls[r].arity));
        }
        for (std::size_t c = 0; c < t.size(); ++c) {
          check_element(t[c], s.size(), where + " column " + std::to_string(c));
        }
        s.set_relation(r, t, true);
        ++k;
      }
    }
    std::size_t f = 0;
    for (const auto& [name, entries] : funs.items()) {
      const auto arity = fun_decls[f].arity;
      std::vector<bool> seen(s.table_size(arity), false);
      for (const auto& [key, value] : entries.items()) {
        const auto args = parse_tuple_key(key, name);
        if (args.size() != arity) {
          throw Error(ErrorKind::kValidation, "function '" + name + "': key " + key +
                                                  " has the wrong number of arguments");
        }
        for (auto a : args) check_element(a, s.size(), "function '" + name + "' key " + key);
        const auto v = value.get<std::uint64_t>();
        check_element(v, s.size(), "function '" + name + "' value at " + key);
        s.set_function(f, args, static_cast<Element>(v));
        seen[s.tuple_index(args)] = true;
      }
      for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c]) {
          throw Error(ErrorKind::kValidation, "function not total: '" + name + "' has no value at " +
                                                  tuple_key(s.tuple_at(c, arity)));
        }
      }
      ++f;
    }
    for (const auto& [name, value] : consts.items()) {
      const auto v = value.get<std::uint64_t>();
      check_element(v, s.size(), "constant '" + name + "'");
      s.set_function(f++, Tuple{}, static_cast<Element>(v));
    }
    return s;
  });
}

Json team_to_json(const Team& team) {
  Json out;
  out["vars"] = team.vars();
  Json rows = Json::array();
  for (const auto& r : team.rows()) rows.push_back(r);
  out["rows"] = rows;
  return out;
}

Team team_from_json(const Json& json, std::size_t domain_size) {
  return guarded("team", [&] {
    if (!json.is_object() || !json.contains("vars") || !json.contains("rows")) {
      throw Error(ErrorKind::kIo, "team must be an object with \"vars\" and \"rows\"");
    }
    const auto vars = json.at("vars").get<std::vector<std::string>>();
    std::vector<Tuple> rows;
    std::size_t r = 0;
    for (const auto& row : json.at("rows")) {
      auto t = tuple_from_json(row);
      if (t.size() != vars.size()) {
        throw Error(ErrorKind::kValidation, "row " + std::to_string(r) + " has " +
                                                std::to_string(t.size()) + " values, expected " +
                                                std::to_string(vars.size()));
      }
      if (domain_size > 0) {
        for (std::size_t c = 0; c < t.size(); ++c) {
          check_element(t[c], domain_size,
                        "row " + std::to_string(r) + ", column " + std::to_string(c) + " (" +
                            vars[c] + ")");
        }
      }
      rows.push_back(std::move(t));
      ++r;
    }
    return Team(vars, std::move(rows));
  });
}

Json coherence_system_to_json(const CoherenceSystem& system) {
  Json out;
  out["vars"] = system.variables;
  out["domain"] = system.domain_size;
  Json family = Json::array();
  for (const auto& [index, rel] : system.family) {
    Json members = Json::array();
    for (std::size_t i = 0; i < 32; ++i) {
      if ((index >> i) & 1U) members.push_back(i);
    }
    family.push_back({{"index", members}, {"tuples", relation_to_json(rel)}});
  }
  out["family"] = family;
  return out;
}

CoherenceSystem coherence_system_from_json(const Json& json) {
  return guarded("coherence system", [&] {
    CoherenceSystem out;
    out.variables = json.at("vars").get<std::vector<std::string>>();
    out.domain_size = json.at("domain").get<std::size_t>();
    for (const auto& entry : json.at("family")) {
      IndexMask index = 0;
      for (const auto& i : entry.at("index")) {
        const auto bit = i.get<std::size_t>();
        if (bit >= out.variables.size()) {
          throw Error(ErrorKind::kShape, "index " + std::to_string(bit) + " outside the enumeration");
        }
        index |= IndexMask{1} << bit;
      }
      std::vector<Tuple> tuples;
      for (const auto& row : entry.at("tuples")) tuples.push_back(tuple_from_json(row));
      for (const auto& t : tuples) {
        if (t.size() != static_cast<std::size_t>(std::popcount(index))) {
          throw Error(ErrorKind::kShape, "tuple width does not match index set " + index_set_string(index));
        }
      }
      if (!out.family.emplace(index, Relation(std::popcount(index), std::move(tuples))).second) {
        throw Error(ErrorKind::kShape, "index set " + index_set_string(index) + " listed twice");
      }
    }
    return out;
  });
}

Json error_json(ErrorKind kind, const std::string& detail) {
  return Json{{"error", {{"kind", std::string(to_string(kind))}, {"detail", detail}}}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
}

Json read_json_file(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kIo, "malformed JSON in '" + path + "': " + e.what());
  }
}

Structure load_structure(const std::string& path) { return structure_from_json(read_json_file(path)); }

void save_structure(const std::string& path, const Structure& structure) {
  write_text_file(path, structure_to_json(structure).dump(2) + "\n");
}

Team load_team(const std::string& path, std::size_t domain_size) {
  return team_from_json(read_json_file(path), domain_size);
}

void save_team(const std::string& path, const Team& team) {
  write_text_file(path, team_to_json(team).dump(2) + "\n");
}

std::vector<Formula> load_formulas(const std::string& path, const ParseOptions& options) {
  return parse_lines(read_text_file(path), options);
}

void save_formulas(const std::string& path, const std::vector<Formula>& formulas) {
  std::string text;
  for (const auto& phi : formulas) text += format(phi) + "\n";
  write_text_file(path, text);
}

}  // namespace teamlog
