#pragma once

#include <set>
#include <string>
#include <vector>

namespace teamlog {

/// A first-order term: a variable or a function symbol applied to argument
/// terms. Constants are 0-ary applications.
struct Term {
  enum class Kind { kVariable, kApply };

  Kind kind = Kind::kVariable;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string name) { return Term{Kind::kVariable, std::move(name), {}}; }
  static Term apply(std::string symbol, std::vector<Term> args = {}) {
    return Term{Kind::kApply, std::move(symbol), std::move(args)};
  }

  bool is_variable() const noexcept { return kind == Kind::kVariable; }

  friend bool operator==(const Term&, const Term&) = default;
};

void collect_vars(const Term& term, std::set<std::string>& out);
std::set<std::string> vars_of(const Term& term);

/// Replaces every occurrence of variable `var` by `replacement`.
Term replace_var(const Term& term, const std::string& var, const Term& replacement);

/// Variables print bare, applications as `f(a,b)`, constants as `c()` so that
/// the text parses back without a signature.
std::string to_string(const Term& term);

}  // namespace teamlog
