#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "teamlog/compactness.hpp"
#include "teamlog/core_model.hpp"
#include "teamlog/errors.hpp"
#include "teamlog/formula.hpp"
#include "teamlog/parser.hpp"

namespace teamlog {

/// Key order is kept as written so that symbol order survives a round trip.
using Json = nlohmann::ordered_json;

/// {"domain": n, "relations": {"R": [[0,1], ...]}, "functions": {"f": {"(0)": 1}},
///  "constants": {"c": 0}, "arities": {"R": 2}}.
/// "arities" is needed only for relations whose table is empty. A 0-ary
/// relation is [[]] when true and [] when false. Saving always writes
/// "arities" for relations, and lists tuples in ascending order.
Json structure_to_json(const Structure& structure);
/// Throws kValidation ("function not total" for a missing table entry, and
/// out-of-range elements) or kIo for malformed input.
Structure structure_from_json(const Json& json);

/// {"vars": [...], "rows": [[...], ...]} with variables and rows sorted.
Json team_to_json(const Team& team);
/// With a positive domain size, every value is checked and a failure names
/// the row and column.
Team team_from_json(const Json& json, std::size_t domain_size = 0);

Json relation_to_json(const Relation& relation);

/// {"vars": [...], "domain": n, "family": [{"index": [0, 1], "tuples": [...]}, ...]}.
Json coherence_system_to_json(const CoherenceSystem& system);
CoherenceSystem coherence_system_from_json(const Json& json);

/// {"error": {"kind": ..., "detail": ...}}.
Json error_json(ErrorKind kind, const std::string& detail);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// Parses a JSON file; kIo on a missing file or malformed JSON.
Json read_json_file(const std::string& path);

Structure load_structure(const std::string& path);
void save_structure(const std::string& path, const Structure& structure);
Team load_team(const std::string& path, std::size_t domain_size = 0);
void save_team(const std::string& path, const Team& team);
/// One formula per line; `#` starts a comment.
std::vector<Formula> load_formulas(const std::string& path, const ParseOptions& options = {});
void save_formulas(const std::string& path, const std::vector<Formula>& formulas);

}  // namespace teamlog
