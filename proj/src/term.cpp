#include "teamlog/term.hpp"

namespace teamlog {

void collect_vars(const Term& term, std::set<std::string>& out) {
  if (term.is_variable()) {
    out.insert(term.name);
    return;
  }
  for (const auto& arg : term.args) collect_vars(arg, out);
}

std::set<std::string> vars_of(const Term& term) {
  std::set<std::string> out;
  collect_vars(term, out);
  return out;
}

Term replace_var(const Term& term, const std::string& var, const Term& replacement) {
  if (term.is_variable()) return term.name == var ? replacement : term;
  Term out = term;
  for (auto& arg : out.args) arg = replace_var(arg, var, replacement);
  return out;
}

std::string to_string(const Term& term) {
  if (term.is_variable()) return term.name;
  std::string out = term.name + "(";
  for (std::size_t i = 0; i < term.args.size(); ++i) {
    if (i > 0) out += ",";
    out += to_string(term.args[i]);
  }
  return out + ")";
}

}  // namespace teamlog
