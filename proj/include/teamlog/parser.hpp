#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/formula.hpp"

namespace teamlog {

struct ParseOptions {
  /// When set, symbols are checked against it and bare identifiers naming a
  /// declared constant parse as that constant instead of a variable.
  const Signature* signature = nullptr;
  /// Rewrite ∨ to ∨s and ∃ to ∃s after parsing.
  bool strict = false;
  /// Accept `$`-prefixed identifiers, which are otherwise reserved for
  /// generated variables.
  bool allow_reserved = false;
};

/// Grammar, loosest binding first:
///   expr   := disj ('->' expr)?
///   disj   := conj (('v' | 'vs' | 'vv') conj)*
///   conj   := unary ('&' unary)*
///   unary  := ('~' | '~.') unary | quant | '(' expr ')' | atom | literal
///   quant  := ('E' | 'Es' | 'A' | 'E1' | 'A1') ident expr
/// Quantifier scope extends as far right as possible.
Formula parse(std::string_view text, const ParseOptions& options = {});

/// One formula per non-blank line; `#` starts a comment.
std::vector<Formula> parse_lines(std::string_view text, const ParseOptions& options = {});

/// Canonical text; parse(format(φ)) == φ.
std::string format(const Formula& phi);

}  // namespace teamlog
