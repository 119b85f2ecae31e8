#include "teamlog/parser.hpp"

#include <cctype>
#include <set>

#include "teamlog/errors.hpp"

namespace teamlog {

namespace {

enum class Tok {
  kIdent,
  kLParen,
  kRParen,
  kComma,
  kSemi,
  kBar,
  kEq,
  kNeq,
  kBang,
  kAmp,
  kArrow,
  kTilde,
  kTildeDot,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const std::set<std::string, std::less<>> kKeywords = {
    "E", "Es", "A", "E1", "A1", "v", "vs", "vv", "dep", "inc", "indep", "excl"};

bool ident_start(char c, bool allow_reserved) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || (allow_reserved && c == '$');
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view text, bool allow_reserved) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::size_t len) {
    out.push_back({kind, std::string(text.substr(i, len)), line, col});
    i += len;
    col += len;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    const char next = i + 1 < text.size() ? text[i + 1] : '\0';
    switch (c) {
      case '(': push(Tok::kLParen, 1); continue;
      case ')': push(Tok::kRParen, 1); continue;
      case ',': push(Tok::kComma, 1); continue;
      case ';': push(Tok::kSemi, 1); continue;
      case '|': push(Tok::kBar, 1); continue;
      case '=': push(Tok::kEq, 1); continue;
      case '&': push(Tok::kAmp, 1); continue;
      case '!': push(next == '=' ? Tok::kNeq : Tok::kBang, next == '=' ? 2 : 1); continue;
      case '~': push(next == '.' ? Tok::kTildeDot : Tok::kTilde, next == '.' ? 2 : 1); continue;
      case '-':
        if (next == '>') {
          push(Tok::kArrow, 2);
          continue;
        }
        break;
      default:
        break;
    }
    if (ident_start(c, allow_reserved)) {
      std::size_t len = 1;
      while (i + len < text.size() && ident_char(text[i + len])) ++len;
      push(Tok::kIdent, len);
      continue;
    }
    if (c == '$') throw ParseError("'$' is reserved for generated variables", line, col);
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options)
      : tokens_(std::move(tokens)), options_(options) {}

  Formula parse_all() {
    Formula phi = expr();
    if (peek().kind != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return phi;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool at_keyword(std::string_view word) const {
    return peek().kind == Tok::kIdent && peek().text == word;
  }
  [[noreturn]] void fail(const std::string& message) const {
    const auto& t = peek();
    throw ParseError(t.kind == Tok::kEnd ? message + " (end of input)" : message, t.line,
                     t.column);
  }
  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    advance();
  }

  Formula expr() {
    Formula left = disj();
    if (peek().kind == Tok::kArrow) {
      advance();
      return Formula::binary(Op::kImpl, std::move(left), expr());
    }
    return left;
  }

  Formula disj() {
    Formula left = conj();
    for (;;) {
      Op op;
      if (at_keyword("v")) {
        op = Op::kOr;
      } else if (at_keyword("vs")) {
        op = Op::kOrStrict;
      } else if (at_keyword("vv")) {
        op = Op::kIntOr;
      } else {
        return left;
      }
      advance();
      left = Formula::binary(op, std::move(left), conj());
    }
  }

  Formula conj() {
    Formula left = unary();
    while (peek().kind == Tok::kAmp) {
      advance();
      left = Formula::conj(std::move(left), unary());
    }
    return left;
  }

  Formula unary() {
    const auto& t = peek();
    if (t.kind == Tok::kTilde) {
      advance();
      return Formula::unary(Op::kClassNeg, unary());
    }
    if (t.kind == Tok::kTildeDot) {
      advance();
      return Formula::unary(Op::kWeakNeg, unary());
    }
    if (t.kind == Tok::kLParen) {
      advance();
      Formula inner = expr();
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (t.kind == Tok::kIdent) {
      static const std::pair<const char*, Op> quantifiers[] = {
          {"E", Op::kExists}, {"Es", Op::kExistsStrict}, {"A", Op::kForall},
          {"E1", Op::kExists1}, {"A1", Op::kForall1}};
      for (const auto& [word, op] : quantifiers) {
        if (t.text == word) {
          advance();
          std::string var = variable("quantified variable");
          return Formula::quantifier(op, std::move(var), expr());
        }
      }
      if (t.text == "dep" || t.text == "inc" || t.text == "indep" || t.text == "excl") {
        return atom();
      }
    }
    return literal();
  }

  std::string variable(const char* what) {
    const auto& t = peek();
    if (t.kind != Tok::kIdent) fail(std::string("expected ") + what);
    if (kKeywords.count(t.text) != 0) fail("'" + t.text + "' is a keyword, not a variable");
    return advance().text;
  }

  std::vector<std::string> variable_list(Tok stop1, Tok stop2 = Tok::kEnd) {
    std::vector<std::string> out;
    if (peek().kind == stop1 || peek().kind == stop2) return out;
    out.push_back(variable("variable"));
    while (peek().kind == Tok::kComma) {
      advance();
      out.push_back(variable("variable"));
    }
    return out;
  }

  Formula atom() {
    const std::string kind = advance().text;
    expect(Tok::kLParen, "'(' after atom name");
    auto xs = variable_list(Tok::kSemi);
    expect(Tok::kSemi, "';'");
    auto ys = variable_list(Tok::kRParen, Tok::kBar);
    std::vector<std::string> zs;
    if (kind == "indep" && peek().kind == Tok::kBar) {
      advance();
      zs = variable_list(Tok::kRParen);
    }
    const auto& close = peek();
    expect(Tok::kRParen, "')'");
    auto length_check = [&] {
      if (xs.size() != ys.size()) {
        throw ParseError(kind + " atom needs tuples of equal length", close.line, close.column);
      }
    };
    if (kind == "dep") {
      if (ys.empty()) throw ParseError("dep atom needs a dependent variable", close.line, close.column);
      Formula out = Formula::dep(xs, ys[0]);
      for (std::size_t i = 1; i < ys.size(); ++i) {
        out = Formula::conj(std::move(out), Formula::dep(xs, ys[i]));
      }
      return out;
    }
    if (kind == "inc") {
      length_check();
      return Formula::inc(std::move(xs), std::move(ys));
    }
    if (kind == "excl") {
      length_check();
      return Formula::excl(std::move(xs), std::move(ys));
    }
    return Formula::indep(std::move(xs), std::move(ys), std::move(zs));
  }

  bool is_constant(const std::string& name) const {
    if (options_.signature == nullptr) return false;
    auto fn = options_.signature->function_index(name);
    return fn && options_.signature->functions()[*fn].arity == 0;
  }

  std::vector<Term> arguments() {
    expect(Tok::kLParen, "'('");
    std::vector<Term> args;
    if (peek().kind != Tok::kRParen) {
      args.push_back(term());
      while (peek().kind == Tok::kComma) {
        advance();
        args.push_back(term());
      }
    }
    expect(Tok::kRParen, "')'");
    return args;
  }

  Term term() {
    if (peek().kind != Tok::kIdent) fail("expected a term");
    if (kKeywords.count(peek().text) != 0) fail("'" + peek().text + "' is a keyword");
    std::string name = advance().text;
    if (peek().kind == Tok::kLParen) return Term::apply(std::move(name), arguments());
    if (is_constant(name)) return Term::apply(std::move(name));
    return Term::var(std::move(name));
  }

  Formula literal() {
    if (peek().kind == Tok::kBang) {
      advance();
      if (peek().kind != Tok::kIdent || kKeywords.count(peek().text) != 0) {
        fail("expected a relation symbol after '!'");
      }
      std::string name = advance().text;
      std::vector<Term> args;
      if (peek().kind == Tok::kLParen) args = arguments();
      return Formula::neg_rel(std::move(name), std::move(args));
    }
    if (peek().kind != Tok::kIdent) fail("expected a formula");
    const std::size_t start = pos_;
    const bool zero_ary_relation =
        peek(1).kind != Tok::kLParen && options_.signature != nullptr &&
        options_.signature->relation_index(peek().text).has_value();
    Term left = term();
    if (peek().kind == Tok::kEq || peek().kind == Tok::kNeq) {
      const bool negated = advance().kind == Tok::kNeq;
      Term right = term();
      return negated ? Formula::neq(std::move(left), std::move(right))
                     : Formula::eq(std::move(left), std::move(right));
    }
    if (!left.is_variable() || zero_ary_relation) {
      return Formula::rel(left.name, std::move(left.args));
    }
    pos_ = start + 1;
    fail("expected '=' or '!=' after a term");
  }

  std::vector<Token> tokens_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

std::string join_terms(const std::vector<Term>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(terms[i]);
  }
  return out;
}

// Binding strength; higher binds tighter.
int level(const Formula& phi) {
  switch (phi.op) {
    case Op::kImpl: return 1;
    case Op::kOr:
    case Op::kOrStrict:
    case Op::kIntOr: return 2;
    case Op::kAnd: return 3;
    case Op::kWeakNeg:
    case Op::kClassNeg: return 4;
    default: return phi.is_quantifier() ? 0 : 5;
  }
}

std::string emit(const Formula& phi);

std::string operand(const Formula& child, int min_level) {
  if (child.is_quantifier() || level(child) < min_level) return "(" + emit(child) + ")";
  return emit(child);
}

std::string emit(const Formula& phi) {
  switch (phi.op) {
    case Op::kEq: return to_string(phi.terms[0]) + " = " + to_string(phi.terms[1]);
    case Op::kNeq: return to_string(phi.terms[0]) + " != " + to_string(phi.terms[1]);
    case Op::kRel: return phi.symbol + "(" + join_terms(phi.terms) + ")";
    case Op::kNegRel: return "!" + phi.symbol + "(" + join_terms(phi.terms) + ")";
    case Op::kDep: return "dep(" + join(phi.xs) + " ; " + join(phi.ys) + ")";
    case Op::kInc: return "inc(" + join(phi.xs) + " ; " + join(phi.ys) + ")";
    case Op::kExcl: return "excl(" + join(phi.xs) + " ; " + join(phi.ys) + ")";
    case Op::kIndep: {
      std::string out = "indep(" + join(phi.xs) + " ; " + join(phi.ys);
      if (!phi.zs.empty()) out += " | " + join(phi.zs);
      return out + ")";
    }
    case Op::kWeakNeg: return "~." + operand(phi.body(), 4);
    case Op::kClassNeg: return "~" + operand(phi.body(), 4);
    default: break;
  }
  if (phi.is_binary()) {
    const int own = level(phi);
    const char* symbol = "&";
    switch (phi.op) {
      case Op::kImpl: symbol = "->"; break;
      case Op::kOr: symbol = "v"; break;
      case Op::kOrStrict: symbol = "vs"; break;
      case Op::kIntOr: symbol = "vv"; break;
      default: break;
    }
    // & and the disjunctions associate left, -> associates right.
    const bool right_assoc = phi.op == Op::kImpl;
    const int left_min = right_assoc ? own + 1 : own;
    const int right_min = right_assoc ? own : own + 1;
    return operand(phi.left(), left_min) + " " + symbol + " " + operand(phi.right(), right_min);
  }
  const char* keyword = "E";
  switch (phi.op) {
    case Op::kExistsStrict: keyword = "Es"; break;
    case Op::kForall: keyword = "A"; break;
    case Op::kExists1: keyword = "E1"; break;
    case Op::kForall1: keyword = "A1"; break;
    default: break;
  }
  const auto& body = phi.body();
  std::string inner = emit(body);
  if (body.is_binary()) inner = "(" + inner + ")";
  return std::string(keyword) + " " + phi.var + " " + inner;
}

}  // namespace

Formula parse(std::string_view text, const ParseOptions& options) {
  Parser parser(lex(text, options.allow_reserved), options);
  Formula phi = parser.parse_all();
  if (options.signature != nullptr) check_signature(phi, *options.signature);
  return options.strict ? strictify(phi) : phi;
}

std::vector<Formula> parse_lines(std::string_view text, const ParseOptions& options) {
  std::vector<Formula> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse(line, options));
      } catch (const ParseError& e) {
        throw ParseError(e.detail(), line_no, e.column());
      }
    }
    start = end + 1;
  }
  return out;
}

std::string format(const Formula& phi) { return emit(phi); }

}  // namespace teamlog
