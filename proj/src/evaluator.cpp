#include "teamlog/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <optional>
#include <set>
#include <unordered_map>

#include "teamlog/errors.hpp"

namespace teamlog {

namespace {

using Codes = std::vector<std::uint64_t>;

constexpr std::size_t kMemoLimit = std::size_t{1} << 22;

struct CTerm {
  int col = -1;
  const std::vector<Element>* table = nullptr;
  std::vector<CTerm> args;
};

struct Node {
  Op op = Op::kEq;
  int a = -1;
  int b = -1;
  std::vector<CTerm> terms;
  const std::vector<std::uint8_t>* relation = nullptr;
  std::vector<int> xs;
  std::vector<int> ys;
  std::vector<int> zs;
  int col = -1;
  bool dc = false;
  bool uc = false;
  // No strict connective below, so only the free columns matter.
  bool local = true;
  // Columns outside the free variables.
  std::vector<int> idle;
  // Quantifiers: a downward-closed formula implied by the body, or -1. Every
  // value chosen for the variable satisfies it on its singleton team.
  int filter = -1;
};

struct KeyHash {
  std::size_t operator()(const Codes& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : key) {
      v ^= v >> 33;
      v *= 0xff51afd7ed558ccdULL;
      v ^= v >> 33;
      h = (h ^ v) * 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Witness {
  Certificate::Kind kind = Certificate::Kind::kNone;
  Codes left;
  Codes right;
  std::vector<std::vector<Element>> images;  // per row of the evaluated team
  Element element = 0;
};

// Downward-closed formula implied by phi, assembled from its downward-closed
// parts through conjunction, disjunction, and quantifiers.
std::optional<Formula> dc_projection(const Formula& phi) {
  if (is_downward_closed(phi)) return phi;
  switch (phi.op) {
    case Op::kAnd: {
      auto left = dc_projection(phi.left());
      auto right = dc_projection(phi.right());
      if (left && right) return Formula::conj(std::move(*left), std::move(*right));
      return left ? left : right;
    }
    case Op::kOr:
    case Op::kOrStrict: {
      auto left = dc_projection(phi.left());
      auto right = dc_projection(phi.right());
      if (left && right) return Formula::lax_or(std::move(*left), std::move(*right));
      return std::nullopt;
    }
    case Op::kExists:
    case Op::kExistsStrict:
    case Op::kForall:
    case Op::kExists1:
    case Op::kForall1: {
      auto body = dc_projection(phi.body());
      if (!body) return std::nullopt;
      const Op op = phi.op == Op::kExistsStrict ? Op::kExists : phi.op;
      return Formula::quantifier(op, phi.var, std::move(*body));
    }
    default:
      return std::nullopt;
  }
}

void sort_unique(Codes& codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
}

}  // namespace

std::uint64_t default_call_budget() {
  if (const char* env = std::getenv("TEAMLOG_BUDGET")) {
    char* end = nullptr;
    const auto value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return value;
  }
  return 50'000'000;
}

struct TeamEvaluator::Impl {
  const Structure* m;
  EvalOptions opt;
  std::size_t n;
  std::vector<std::string> team_vars;
  std::vector<std::string> columns;
  std::vector<int> team_cols;
  std::vector<std::uint64_t> pw;
  std::vector<Node> nodes;
  int root = -1;
  EvalStats stats;
  std::uint64_t call_limit = 0;
  std::unordered_map<Codes, bool, KeyHash> memo;

  Impl(const Structure& structure, const Formula& phi, std::vector<std::string> vars,
       EvalOptions options)
      : m(&structure), opt(options), n(structure.size()), team_vars(std::move(vars)) {
    auto sorted = team_vars;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::kValidation, "team variables must be distinct");
    }
    team_vars = sorted;
    check_signature(phi, structure.signature());
    for (const auto& v : free_vars(phi)) {
      if (!std::binary_search(team_vars.begin(), team_vars.end(), v)) {
        throw Error(ErrorKind::kUnbound, "free variable '" + v + "' is not in the team domain");
      }
    }
    std::set<std::string> all(team_vars.begin(), team_vars.end());
    collect_bound(phi, all);
    columns.assign(all.begin(), all.end());
    pw.assign(columns.size(), 1);
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
    for (std::size_t c = columns.size(); c-- > 1;) {
      if (pw[c] > kLimit / n) throw BudgetExceeded("too many variables to encode assignments");
      pw[c - 1] = pw[c] * n;
    }
    if (!columns.empty() && pw[0] > kLimit / n) {
      throw BudgetExceeded("too many variables to encode assignments");
    }
    for (const auto& v : team_vars) team_cols.push_back(column_of(v));
    root = compile(phi);
  }

  static void collect_bound(const Formula& phi, std::set<std::string>& out) {
    if (phi.is_quantifier()) out.insert(phi.var);
    for (const auto& child : phi.children) collect_bound(child, out);
  }

  int column_of(const std::string& v) const {
    auto it = std::lower_bound(columns.begin(), columns.end(), v);
    return static_cast<int>(it - columns.begin());
  }

  CTerm compile_term(const Term& t) const {
    CTerm out;
    if (t.is_variable()) {
      out.col = column_of(t.name);
      return out;
    }
    const auto fn = *m->signature().function_index(t.name);
    out.table = &m->function_table(fn);
    for (const auto& arg : t.args) out.args.push_back(compile_term(arg));
    return out;
  }

  std::vector<int> cols(const std::vector<std::string>& vars) const {
    std::vector<int> out;
    for (const auto& v : vars) out.push_back(column_of(v));
    return out;
  }

  int compile(const Formula& phi) {
    Node nd;
    nd.op = phi.op;
    nd.dc = is_downward_closed(phi);
    nd.uc = is_union_closed(phi);
    if (phi.is_literal()) {
      for (const auto& t : phi.terms) nd.terms.push_back(compile_term(t));
      if (phi.op == Op::kRel || phi.op == Op::kNegRel) {
        nd.relation = &m->relation_table(*m->signature().relation_index(phi.symbol));
      }
    } else if (phi.is_atom()) {
      nd.xs = cols(phi.xs);
      nd.ys = cols(phi.ys);
      nd.zs = cols(phi.zs);
    } else {
      if (phi.is_quantifier()) nd.col = column_of(phi.var);
      nd.a = compile(phi.children[0]);
      if (phi.children.size() > 1) nd.b = compile(phi.children[1]);
      nd.local = phi.op != Op::kOrStrict && phi.op != Op::kExistsStrict &&
                 nodes[static_cast<std::size_t>(nd.a)].local &&
                 (nd.b < 0 || nodes[static_cast<std::size_t>(nd.b)].local);
      if (phi.is_quantifier() && !nodes[static_cast<std::size_t>(nd.a)].dc) {
        if (auto implied = dc_projection(phi.body())) nd.filter = compile(*implied);
      }
    }
    const auto fv = free_vars(phi);
    for (int c = 0; c < static_cast<int>(pw.size()); ++c) {
      if (!fv.contains(columns[static_cast<std::size_t>(c)])) nd.idle.push_back(c);
    }
    nodes.push_back(std::move(nd));
    return static_cast<int>(nodes.size() - 1);
  }

  Element digit(std::uint64_t code, int c) const {
    return static_cast<Element>((code / pw[static_cast<std::size_t>(c)]) % n);
  }

  std::uint64_t with_digit(std::uint64_t code, int c, Element a) const {
    const auto p = pw[static_cast<std::size_t>(c)];
    return code - static_cast<std::uint64_t>(digit(code, c)) * p + static_cast<std::uint64_t>(a) * p;
  }

  Element term_value(const CTerm& t, std::uint64_t code) const {
    if (t.col >= 0) return digit(code, t.col);
    std::size_t index = 0;
    for (const auto& arg : t.args) index = index * n + term_value(arg, code);
    return (*t.table)[index];
  }

  bool literal_holds(const Node& nd, std::uint64_t code) const {
    switch (nd.op) {
      case Op::kEq: return term_value(nd.terms[0], code) == term_value(nd.terms[1], code);
      case Op::kNeq: return term_value(nd.terms[0], code) != term_value(nd.terms[1], code);
      default: break;
    }
    std::size_t index = 0;
    for (const auto& t : nd.terms) index = index * n + term_value(t, code);
    const bool holds = (*nd.relation)[index] != 0;
    return nd.op == Op::kRel ? holds : !holds;
  }

  std::uint64_t key(const std::vector<int>& cs, std::uint64_t code) const {
    std::uint64_t k = 0;
    for (int c : cs) k = k * n + digit(code, c);
    return k;
  }

  void tick() {
    if (++stats.calls > call_limit) {
      throw BudgetExceeded("evaluation exceeded the budget of " + std::to_string(opt.max_calls) +
                           " calls");
    }
  }

  void check_split(std::size_t rows) const {
    if (rows > opt.max_split_rows) {
      throw BudgetExceeded("subteam search over " + std::to_string(rows) +
                           " rows exceeds the limit of " + std::to_string(opt.max_split_rows));
    }
  }

  void start() {
    memo.clear();
    call_limit = stats.calls + opt.max_calls;
  }

  // Team operations on codes; all results sorted and duplicate-free.
  Codes duplicate(const Codes& x, int c) const {
    Codes out;
    out.reserve(x.size() * n);
    for (auto code : x) {
      for (Element a = 0; a < n; ++a) out.push_back(with_digit(code, c, a));
    }
    sort_unique(out);
    return out;
  }

  Codes constant(const Codes& x, int c, Element a) const {
    Codes out;
    out.reserve(x.size());
    for (auto code : x) out.push_back(with_digit(code, c, a));
    sort_unique(out);
    return out;
  }

  Codes bases(const Codes& x, int c) const { return constant(x, c, 0); }

  std::size_t base_index(const Codes& base, std::uint64_t code, int c) const {
    auto it = std::lower_bound(base.begin(), base.end(), with_digit(code, c, 0));
    return static_cast<std::size_t>(it - base.begin());
  }

  static Codes select(const Codes& x, std::uint64_t mask) {
    Codes out;
    for (std::size_t r = 0; r < x.size(); ++r) {
      if ((mask >> r) & 1U) out.push_back(x[r]);
    }
    return out;
  }

  bool atom_holds(const Node& nd, const Codes& x) const {
    switch (nd.op) {
      case Op::kDep: {
        std::vector<std::pair<std::uint64_t, Element>> pairs;
        pairs.reserve(x.size());
        for (auto code : x) pairs.emplace_back(key(nd.xs, code), digit(code, nd.ys[0]));
        std::sort(pairs.begin(), pairs.end());
        for (std::size_t i = 1; i < pairs.size(); ++i) {
          if (pairs[i].first == pairs[i - 1].first && pairs[i].second != pairs[i - 1].second) {
            return false;
          }
        }
        return true;
      }
      case Op::kInc:
      case Op::kExcl: {
        Codes targets;
        targets.reserve(x.size());
        for (auto code : x) targets.push_back(key(nd.ys, code));
        sort_unique(targets);
        const bool want = nd.op == Op::kInc;
        for (auto code : x) {
          if (std::binary_search(targets.begin(), targets.end(), key(nd.xs, code)) != want) {
            return false;
          }
        }
        return true;
      }
      case Op::kIndep: {
        // Per value of z the (x, y) pairs must be the full product of the
        // x-values and y-values occurring with that z.
        std::vector<std::array<std::uint64_t, 3>> triples;
        triples.reserve(x.size());
        for (auto code : x) triples.push_back({key(nd.zs, code), key(nd.xs, code), key(nd.ys, code)});
        std::sort(triples.begin(), triples.end());
        triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
        for (std::size_t lo = 0; lo < triples.size();) {
          std::size_t hi = lo;
          while (hi < triples.size() && triples[hi][0] == triples[lo][0]) ++hi;
          Codes xv;
          Codes yv;
          for (std::size_t i = lo; i < hi; ++i) {
            xv.push_back(triples[i][1]);
            yv.push_back(triples[i][2]);
          }
          sort_unique(xv);
          sort_unique(yv);
          if (xv.size() * yv.size() != hi - lo) return false;
          lo = hi;
        }
        return true;
      }
      default:
        return false;
    }
  }

  bool sat(int id, const Codes& x) {
    tick();
    const Node& nd = nodes[static_cast<std::size_t>(id)];
    switch (nd.op) {
      case Op::kEq:
      case Op::kNeq:
      case Op::kRel:
      case Op::kNegRel:
        return std::all_of(x.begin(), x.end(),
                           [&](std::uint64_t code) { return literal_holds(nd, code); });
      case Op::kDep:
      case Op::kInc:
      case Op::kIndep:
      case Op::kExcl:
        return atom_holds(nd, x);
      case Op::kAnd:
        return sat(nd.a, x) && sat(nd.b, x);
      case Op::kIntOr:
        return sat(nd.a, x) || sat(nd.b, x);
      case Op::kWeakNeg:
        return x.empty() || !sat(nd.a, x);
      case Op::kClassNeg:
        return !sat(nd.a, x);
      default:
        break;
    }
    if (opt.prune && nd.local && !nd.idle.empty() && x.size() > 1) {
      Codes y;
      y.reserve(x.size());
      for (auto code : x) {
        for (int c : nd.idle) code = with_digit(code, c, 0);
        y.push_back(code);
      }
      sort_unique(y);
      if (y.size() < x.size()) return sat(id, y);
    }
    if (!opt.memoize) return search(id, x, nullptr);
    Codes memo_key;
    memo_key.reserve(x.size() + 1);
    memo_key.push_back(static_cast<std::uint64_t>(id));
    memo_key.insert(memo_key.end(), x.begin(), x.end());
    if (auto it = memo.find(memo_key); it != memo.end()) {
      ++stats.memo_hits;
      return it->second;
    }
    const bool result = search(id, x, nullptr);
    if (memo.size() >= kMemoLimit) memo.clear();
    memo.emplace(std::move(memo_key), result);
    return result;
  }

  bool search(int id, const Codes& x, Witness* w) {
    const Node& nd = nodes[static_cast<std::size_t>(id)];
    if (opt.prune && nd.uc && !nd.dc) return via_max_subteam(nd, id, x, w);
    // Downward and union closure together make the node flat.
    if (opt.prune && nd.uc && nd.dc && w == nullptr && x.size() > 1) {
      return std::all_of(x.begin(), x.end(), [&](std::uint64_t row) { return sat(id, Codes{row}); });
    }
    switch (nd.op) {
      case Op::kOr: {
        const bool dl = opt.prune && node(nd.a).dc;
        const bool dr = opt.prune && node(nd.b).dc;
        if (auto r = dc_against_uc(nd, x, w)) return *r;
        // A cover with one downward-closed side shrinks to a partition.
        if (dl || dr) return partition(nd, x, dl, dr, w);
        return cover(nd, x, w);
      }
      case Op::kOrStrict:
        if (auto r = dc_against_uc(nd, x, w)) return *r;
        return partition(nd, x, opt.prune && node(nd.a).dc, opt.prune && node(nd.b).dc, w);
      case Op::kExists:
        // A downward-closed body admits a single value per assignment.
        if (opt.prune && node(nd.a).dc) return per_base(nd, x, true, w);
        return lax_exists(nd, x, w);
      case Op::kExistsStrict:
        if (opt.prune && node(nd.a).dc) return per_base(nd, x, true, w);
        return strict_exists(nd, x, w);
      case Op::kForall:
        return sat(nd.a, duplicate(x, nd.col));
      case Op::kExists1:
        for (Element a = 0; a < n; ++a) {
          if (sat(nd.a, constant(x, nd.col, a))) {
            if (w != nullptr) {
              w->kind = Certificate::Kind::kElement;
              w->element = a;
            }
            return true;
          }
        }
        return false;
      case Op::kForall1:
        for (Element a = 0; a < n; ++a) {
          if (!sat(nd.a, constant(x, nd.col, a))) return false;
        }
        return true;
      case Op::kImpl: {
        check_split(x.size());
        const std::uint64_t count = std::uint64_t{1} << x.size();
        for (std::uint64_t mask = 0; mask < count; ++mask) {
          const auto y = select(x, mask);
          if (sat(nd.a, y) && !sat(nd.b, y)) return false;
        }
        return true;
      }
      default:
        return sat(id, x);
    }
  }

  const Node& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }

  // Downward-closed side against a union-closed side: the union-closed part
  // can take its maximal subteam and the rest must satisfy the other side.
  std::optional<bool> dc_against_uc(const Node& nd, const Codes& x, Witness* w) {
    if (!opt.prune) return std::nullopt;
    const bool left_dc = node(nd.a).dc && node(nd.b).uc;
    const bool right_dc = node(nd.b).dc && node(nd.a).uc;
    if (!left_dc && !right_dc) return std::nullopt;
    const int big = left_dc ? nd.b : nd.a;
    const int small = left_dc ? nd.a : nd.b;
    const Codes most = max_subteam(big, x);
    Codes rest;
    std::set_difference(x.begin(), x.end(), most.begin(), most.end(), std::back_inserter(rest));
    if (!sat(small, rest)) return false;
    if (w != nullptr) {
      w->kind = Certificate::Kind::kCover;
      w->left = left_dc ? rest : most;
      w->right = left_dc ? most : rest;
    }
    return true;
  }

  bool partition(const Node& nd, const Codes& x, bool prune_left, bool prune_right, Witness* w) {
    const std::size_t rows = x.size();
    std::vector<char> can_left(rows, 1);
    std::vector<char> can_right(rows, 1);
    std::size_t open = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (prune_left) can_left[r] = sat(nd.a, Codes{x[r]});
      if (prune_right) can_right[r] = sat(nd.b, Codes{x[r]});
      if (!can_left[r] && !can_right[r]) return false;
      if (can_left[r] && can_right[r]) ++open;
    }
    // Only rows with two options branch; pruning both sides keeps the
    // search within the call budget.
    if (!(prune_left && prune_right)) check_split(open);
    Codes left;
    Codes right;
    const bool found = split(nd, x, 0, left, right, can_left, can_right, prune_left, prune_right);
    if (found && w != nullptr) {
      w->kind = Certificate::Kind::kCover;
      w->left = left;
      w->right = right;
    }
    return found;
  }

  bool split(const Node& nd, const Codes& x, std::size_t r, Codes& left, Codes& right,
             const std::vector<char>& can_left, const std::vector<char>& can_right,
             bool prune_left, bool prune_right) {
    if (r == x.size()) return sat(nd.a, left) && sat(nd.b, right);
    if (can_left[r]) {
      left.push_back(x[r]);
      if ((!prune_left || sat(nd.a, left)) &&
          split(nd, x, r + 1, left, right, can_left, can_right, prune_left, prune_right)) {
        return true;
      }
      left.pop_back();
    }
    if (can_right[r]) {
      right.push_back(x[r]);
      if ((!prune_right || sat(nd.b, right)) &&
          split(nd, x, r + 1, left, right, can_left, can_right, prune_left, prune_right)) {
        return true;
      }
      right.pop_back();
    }
    return false;
  }

  // Every row goes left, right, or both: Y ranges over all masks with
  // sat(left), Z over the supersets of the complement of Y within X.
  bool cover(const Node& nd, const Codes& x, Witness* w) {
    const std::size_t rows = x.size();
    check_split(rows);
    const std::uint64_t full = (std::uint64_t{1} << rows) - 1;
    std::vector<signed char> left_sat(full + 1, -1);
    std::vector<signed char> right_sat(full + 1, -1);
    auto left_ok = [&](std::uint64_t mask) {
      if (left_sat[mask] < 0) left_sat[mask] = sat(nd.a, select(x, mask)) ? 1 : 0;
      return left_sat[mask] == 1;
    };
    auto right_ok = [&](std::uint64_t mask) {
      if (right_sat[mask] < 0) right_sat[mask] = sat(nd.b, select(x, mask)) ? 1 : 0;
      return right_sat[mask] == 1;
    };
    for (std::uint64_t y = 0; y <= full; ++y) {
      if (!left_ok(y)) continue;
      const std::uint64_t rest = full & ~y;
      std::uint64_t extra = 0;
      do {
        if (right_ok(rest | extra)) {
          if (w != nullptr) {
            w->kind = Certificate::Kind::kCover;
            w->left = select(x, y);
            w->right = select(x, rest | extra);
          }
          return true;
        }
        extra = (extra - y) & y;
      } while (extra != 0);
    }
    return false;
  }

  void supplement_witness(const Node& nd, const Codes& x, const Codes& base,
                          const std::vector<std::vector<Element>>& base_images, Witness* w) const {
    if (w == nullptr) return;
    w->kind = Certificate::Kind::kSupplement;
    w->images.clear();
    for (auto code : x) w->images.push_back(base_images[base_index(base, code, nd.col)]);
  }

  // One value per distinct assignment outside the quantified column. With
  // `check_partials` the body is downward closed and partial teams prune.
  // Values per base row passing every filter on the singleton team; empty
  // result when some base row has none.
  std::vector<std::vector<Element>> allowed_values(const Codes& base, int col,
                                                   const std::vector<int>& filters) {
    std::vector<std::vector<Element>> allowed(base.size());
    for (std::size_t r = 0; r < base.size(); ++r) {
      for (Element a = 0; a < n; ++a) {
        const Codes single{with_digit(base[r], col, a)};
        if (std::all_of(filters.begin(), filters.end(), [&](int f) { return sat(f, single); })) {
          allowed[r].push_back(a);
        }
      }
      if (allowed[r].empty()) return {};
    }
    return allowed;
  }

  std::vector<int> filters_for(const Node& nd, bool body_is_dc) const {
    if (body_is_dc) return {nd.a};
    if (opt.prune && nd.filter >= 0) return {nd.filter};
    return {};
  }

  bool per_base(const Node& nd, const Codes& x, bool check_partials, Witness* w) {
    const Codes base = bases(x, nd.col);
    const auto allowed = allowed_values(base, nd.col, filters_for(nd, check_partials));
    if (allowed.empty() && !base.empty()) return false;
    std::vector<Element> choice(base.size());
    Codes chosen;
    auto rec = [&](auto&& self, std::size_t r) -> bool {
      if (r == base.size()) {
        if (check_partials && r > 0) return true;
        Codes team = chosen;
        std::sort(team.begin(), team.end());
        return sat(nd.a, team);
      }
      for (Element a : allowed[r]) {
        choice[r] = a;
        chosen.push_back(with_digit(base[r], nd.col, a));
        bool ok = true;
        if (check_partials) {
          Codes team = chosen;
          std::sort(team.begin(), team.end());
          ok = sat(nd.a, team);
        }
        if (ok && self(self, r + 1)) return true;
        chosen.pop_back();
      }
      return false;
    };
    if (!rec(rec, 0)) return false;
    std::vector<std::vector<Element>> images;
    for (auto a : choice) images.push_back({a});
    supplement_witness(nd, x, base, images, w);
    return true;
  }

  // Strict quantifier without pruning: one value per row of X.
  bool strict_exists(const Node& nd, const Codes& x, Witness* w) {
    const Codes base = bases(x, nd.col);
    const auto allowed = allowed_values(base, nd.col, filters_for(nd, false));
    if (allowed.empty() && !base.empty()) return false;
    std::vector<std::size_t> row_base(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) row_base[r] = base_index(base, x[r], nd.col);
    std::vector<Element> choice(x.size(), 0);
    auto rec = [&](auto&& self, std::size_t r) -> bool {
      if (r == x.size()) {
        Codes team;
        team.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) team.push_back(with_digit(x[i], nd.col, choice[i]));
        sort_unique(team);
        return sat(nd.a, team);
      }
      for (Element a : allowed[row_base[r]]) {
        choice[r] = a;
        if (self(self, r + 1)) return true;
      }
      return false;
    };
    if (!rec(rec, 0)) return false;
    if (w != nullptr) {
      w->kind = Certificate::Kind::kSupplement;
      w->images.clear();
      for (auto a : choice) w->images.push_back({a});
    }
    return true;
  }

  // Lax quantifier without pruning: singleton images first, then every
  // nonempty image per assignment in (size, mask) order.
  bool lax_exists(const Node& nd, const Codes& x, Witness* w) {
    if (per_base(nd, x, false, w)) return true;
    if (n > 16) throw BudgetExceeded("image enumeration over a domain of size " + std::to_string(n));
    const Codes base = bases(x, nd.col);
    const auto allowed = allowed_values(base, nd.col, filters_for(nd, false));
    if (allowed.empty() && !base.empty()) return false;
    const auto order = canonical_subset_order(n);
    std::vector<std::vector<std::uint64_t>> images(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      std::uint64_t permitted = 0;
      for (Element a : allowed[i]) permitted |= std::uint64_t{1} << a;
      for (auto mask : order) {
        if (mask != 0 && (mask & ~permitted) == 0) images[i].push_back(mask);
      }
    }
    std::vector<std::uint64_t> choice(base.size(), 0);
    auto rec = [&](auto&& self, std::size_t r) -> bool {
      if (r == base.size()) {
        Codes team;
        for (std::size_t i = 0; i < base.size(); ++i) {
          for (Element a = 0; a < n; ++a) {
            if ((choice[i] >> a) & 1U) team.push_back(with_digit(base[i], nd.col, a));
          }
        }
        sort_unique(team);
        return sat(nd.a, team);
      }
      for (auto mask : images[r]) {
        choice[r] = mask;
        if (self(self, r + 1)) return true;
      }
      return false;
    };
    if (!rec(rec, 0)) return false;
    std::vector<std::vector<Element>> found(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (Element a = 0; a < n; ++a) {
        if ((choice[i] >> a) & 1U) found[i].push_back(a);
      }
    }
    supplement_witness(nd, x, base, found, w);
    return true;
  }

  // Largest subteam satisfying a union-closed node.
  Codes max_subteam(int id, const Codes& x) {
    tick();
    const Node& nd = node(id);
    if (nd.uc && nd.dc && nd.op != Op::kInc) {
      // A flat node keeps exactly its singly satisfied rows.
      Codes out;
      for (auto code : x) {
        if (sat(id, Codes{code})) out.push_back(code);
      }
      return out;
    }
    switch (nd.op) {
      case Op::kEq:
      case Op::kNeq:
      case Op::kRel:
      case Op::kNegRel: {
        Codes out;
        for (auto code : x) {
          if (literal_holds(nd, code)) out.push_back(code);
        }
        return out;
      }
      case Op::kInc: {
        Codes y = x;
        for (;;) {
          Codes targets;
          for (auto code : y) targets.push_back(key(nd.ys, code));
          sort_unique(targets);
          Codes kept;
          for (auto code : y) {
            if (std::binary_search(targets.begin(), targets.end(), key(nd.xs, code))) {
              kept.push_back(code);
            }
          }
          if (kept.size() == y.size()) return y;
          y = std::move(kept);
        }
      }
      case Op::kAnd: {
        Codes y = x;
        for (;;) {
          Codes next = max_subteam(nd.b, max_subteam(nd.a, y));
          if (next.size() == y.size()) return y;
          y = std::move(next);
        }
      }
      case Op::kOr: {
        Codes left = max_subteam(nd.a, x);
        Codes right = max_subteam(nd.b, x);
        Codes out;
        std::set_union(left.begin(), left.end(), right.begin(), right.end(),
                       std::back_inserter(out));
        return out;
      }
      case Op::kExists: {
        const Codes img = max_subteam(nd.a, duplicate(x, nd.col));
        const Codes reached = bases(img, nd.col);
        Codes out;
        for (auto code : x) {
          if (std::binary_search(reached.begin(), reached.end(), with_digit(code, nd.col, 0))) {
            out.push_back(code);
          }
        }
        return out;
      }
      case Op::kForall: {
        Codes y = x;
        for (;;) {
          const Codes img = max_subteam(nd.a, duplicate(y, nd.col));
          Codes kept;
          for (auto code : y) {
            bool all = true;
            for (Element a = 0; a < n && all; ++a) {
              all = std::binary_search(img.begin(), img.end(), with_digit(code, nd.col, a));
            }
            if (all) kept.push_back(code);
          }
          if (kept.size() == y.size()) return y;
          y = std::move(kept);
        }
      }
      default:
        throw Error(ErrorKind::kFragment, "maximal subteam requested outside inclusion logic");
    }
  }

  bool via_max_subteam(const Node& nd, int id, const Codes& x, Witness* w) {
    if (max_subteam(id, x).size() != x.size()) return false;
    if (w == nullptr) return true;
    if (nd.op == Op::kOr) {
      w->kind = Certificate::Kind::kCover;
      w->left = max_subteam(nd.a, x);
      w->right = max_subteam(nd.b, x);
    } else if (nd.op == Op::kExists) {
      const Codes img = max_subteam(nd.a, duplicate(x, nd.col));
      w->kind = Certificate::Kind::kSupplement;
      w->images.clear();
      for (auto code : x) {
        std::vector<Element> image;
        for (Element a = 0; a < n; ++a) {
          if (std::binary_search(img.begin(), img.end(), with_digit(code, nd.col, a))) {
            image.push_back(a);
          }
        }
        w->images.push_back(std::move(image));
      }
    }
    return true;
  }

  Codes encode(const Team& team) const {
    if (team.vars() != team_vars) {
      throw Error(ErrorKind::kShape, "team domain does not match the evaluator's domain");
    }
    team.validate(n);
    Codes out;
    out.reserve(team.size());
    for (const auto& row : team.rows()) {
      std::uint64_t code = 0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        code += static_cast<std::uint64_t>(row[i]) * pw[static_cast<std::size_t>(team_cols[i])];
      }
      out.push_back(code);
    }
    sort_unique(out);
    return out;
  }

  Team decode(const Codes& codes) const {
    std::vector<Tuple> rows;
    rows.reserve(codes.size());
    for (auto code : codes) {
      Tuple row;
      row.reserve(team_cols.size());
      for (int c : team_cols) row.push_back(digit(code, c));
      rows.push_back(std::move(row));
    }
    return Team(team_vars, std::move(rows));
  }
};

TeamEvaluator::TeamEvaluator(const Structure& structure, const Formula& phi,
                             std::vector<std::string> team_vars, EvalOptions options)
    : impl_(std::make_unique<Impl>(structure, phi, std::move(team_vars), options)) {}

TeamEvaluator::~TeamEvaluator() = default;
TeamEvaluator::TeamEvaluator(TeamEvaluator&&) noexcept = default;
TeamEvaluator& TeamEvaluator::operator=(TeamEvaluator&&) noexcept = default;

bool TeamEvaluator::sat(const Team& team) {
  const auto codes = impl_->encode(team);
  return sat_encoded(codes);
}

bool TeamEvaluator::sat_encoded(std::span<const std::uint64_t> codes) {
  impl_->start();
  return impl_->sat(impl_->root, Codes(codes.begin(), codes.end()));
}

EvalResult TeamEvaluator::sat_with_certificate(const Team& team) {
  const auto x = impl_->encode(team);
  const auto before = impl_->stats;
  impl_->start();
  Witness w;
  EvalResult result;
  const auto op = impl_->node(impl_->root).op;
  if (op == Op::kOr || op == Op::kOrStrict || op == Op::kExists || op == Op::kExistsStrict ||
      op == Op::kExists1) {
    impl_->tick();
    result.value = impl_->search(impl_->root, x, &w);
  } else {
    result.value = impl_->sat(impl_->root, x);
  }
  if (result.value) {
    auto& cert = result.certificate;
    cert.kind = w.kind;
    if (w.kind == Certificate::Kind::kCover) {
      cert.left = impl_->decode(w.left);
      cert.right = impl_->decode(w.right);
    } else if (w.kind == Certificate::Kind::kSupplement || w.kind == Certificate::Kind::kElement) {
      cert.var = impl_->columns[static_cast<std::size_t>(impl_->node(impl_->root).col)];
      cert.images = std::move(w.images);
      cert.element = w.element;
    }
  }
  result.stats.calls = impl_->stats.calls - before.calls;
  result.stats.memo_hits = impl_->stats.memo_hits - before.memo_hits;
  return result;
}

std::vector<std::uint64_t> TeamEvaluator::encode(const Team& team) const {
  return impl_->encode(team);
}

const std::vector<std::string>& TeamEvaluator::team_vars() const { return impl_->team_vars; }

const EvalStats& TeamEvaluator::stats() const { return impl_->stats; }

bool eval(const Structure& structure, const Team& team, const Formula& phi,
          const EvalOptions& options) {
  return TeamEvaluator(structure, phi, team.vars(), options).sat(team);
}

EvalResult eval_with_certificate(const Structure& structure, const Team& team,
                                 const Formula& phi, const EvalOptions& options) {
  return TeamEvaluator(structure, phi, team.vars(), options).sat_with_certificate(team);
}

bool verify_certificate(const Structure& structure, const Team& team, const Formula& phi,
                        const Certificate& certificate, const EvalOptions& options) {
  switch (certificate.kind) {
    case Certificate::Kind::kNone:
      return eval(structure, team, phi, options);
    case Certificate::Kind::kCover: {
      if (phi.op != Op::kOr && phi.op != Op::kOrStrict) return false;
      if (!(team_union(certificate.left, certificate.right) == team)) return false;
      if (phi.op == Op::kOrStrict && !team_intersection(certificate.left, certificate.right).empty()) {
        return false;
      }
      return eval(structure, certificate.left, phi.left(), options) &&
             eval(structure, certificate.right, phi.right(), options);
    }
    case Certificate::Kind::kSupplement: {
      if (phi.op != Op::kExists && phi.op != Op::kExistsStrict) return false;
      if (certificate.var != phi.var) return false;
      SupplementFunction f(team, certificate.images, structure.size());
      if (phi.op == Op::kExistsStrict) {
        for (const auto& image : f.images()) {
          if (image.size() != 1) return false;
        }
      }
      return eval(structure, supplement(team, phi.var, f), phi.body(), options);
    }
    case Certificate::Kind::kElement:
      if (phi.op != Op::kExists1 || certificate.var != phi.var) return false;
      return eval(structure, supplement_const(team, phi.var, certificate.element, structure),
                  phi.body(), options);
  }
  return false;
}

namespace {

using Env = std::vector<std::pair<std::string, Element>>;

Element tarski_term(const Structure& structure, const Env& env, const Term& t) {
  if (t.is_variable()) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == t.name) return it->second;
    }
    throw Error(ErrorKind::kUnbound, "unbound variable '" + t.name + "'");
  }
  auto fn = structure.signature().function_index(t.name);
  if (!fn) throw Error(ErrorKind::kSymbol, "unknown function symbol '" + t.name + "'");
  Tuple args;
  for (const auto& arg : t.args) args.push_back(tarski_term(structure, env, arg));
  return structure.apply(*fn, args);
}

bool tarski_rec(const Structure& structure, Env& env, const Formula& phi) {
  switch (phi.op) {
    case Op::kEq:
      return tarski_term(structure, env, phi.terms[0]) == tarski_term(structure, env, phi.terms[1]);
    case Op::kNeq:
      return tarski_term(structure, env, phi.terms[0]) != tarski_term(structure, env, phi.terms[1]);
    case Op::kRel:
    case Op::kNegRel: {
      auto rel = structure.signature().relation_index(phi.symbol);
      if (!rel) throw Error(ErrorKind::kSymbol, "unknown relation symbol '" + phi.symbol + "'");
      Tuple args;
      for (const auto& t : phi.terms) args.push_back(tarski_term(structure, env, t));
      return structure.holds(*rel, args) == (phi.op == Op::kRel);
    }
    case Op::kAnd:
      return tarski_rec(structure, env, phi.left()) && tarski_rec(structure, env, phi.right());
    case Op::kOr:
    case Op::kOrStrict:
      return tarski_rec(structure, env, phi.left()) || tarski_rec(structure, env, phi.right());
    case Op::kExists:
    case Op::kExistsStrict:
    case Op::kForall: {
      const bool want = phi.op != Op::kForall;
      for (Element a = 0; a < structure.size(); ++a) {
        env.emplace_back(phi.var, a);
        const bool value = tarski_rec(structure, env, phi.body());
        env.pop_back();
        if (value == want) return want;
      }
      return !want;
    }
    default:
      throw Error(ErrorKind::kFragment,
                  std::string("'") + std::string(op_name(phi.op)) + "' is not first-order");
  }
}

}  // namespace

bool tarski(const Structure& structure, const Assignment& assignment, const Formula& phi) {
  if (!is_first_order(phi)) throw Error(ErrorKind::kFragment, "formula is not first-order");
  Env env;
  for (std::size_t i = 0; i < assignment.vars().size(); ++i) {
    env.emplace_back(assignment.vars()[i], assignment.values()[i]);
  }
  return tarski_rec(structure, env, phi);
}

bool eval_flat_fo(const Structure& structure, const Team& team, const Formula& phi) {
  if (!is_first_order(phi)) throw Error(ErrorKind::kFragment, "formula is not first-order");
  check_signature(phi, structure.signature());
  for (const auto& v : free_vars(phi)) {
    if (!team.column(v)) throw Error(ErrorKind::kUnbound, "free variable '" + v + "' not in team");
  }
  team.validate(structure.size());
  for (std::size_t r = 0; r < team.size(); ++r) {
    if (!tarski(structure, team.assignment(r), phi)) return false;
  }
  return true;
}

std::vector<Team> sat_teams(const Structure& structure, const Formula& phi,
                            const std::vector<std::string>& domain, const EvalOptions& options,
                            std::size_t max_rows) {
  std::size_t space = 1;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    space *= structure.size();
    if (space > max_rows) {
      throw BudgetExceeded("team space exceeds " + std::to_string(max_rows) + " assignments");
    }
  }
  const Team full = full_team(domain, structure.size());
  TeamEvaluator evaluator(structure, phi, full.vars(), options);
  const auto codes = evaluator.encode(full);
  std::vector<Team> out;
  for (auto mask : canonical_subset_order(codes.size())) {
    if (mask == 0) continue;
    std::vector<std::uint64_t> sub;
    for (std::size_t r = 0; r < codes.size(); ++r) {
      if ((mask >> r) & 1U) sub.push_back(codes[r]);
    }
    if (evaluator.sat_encoded(sub)) out.push_back(subteam(full, mask));
  }
  return out;
}

SatSearchResult sat_search(const std::vector<Formula>& gamma, const Signature& signature,
                           std::size_t max_n, const EvalOptions& options) {
  const auto fv = free_vars(gamma);
  const std::vector<std::string> vars(fv.begin(), fv.end());
  for (const auto& phi : gamma) check_signature(phi, signature);
  SatSearchResult result;
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::size_t space = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      space *= n;
      if (space > 16) throw BudgetExceeded("team space of the search exceeds 16 assignments");
    }
    const Team full = full_team(vars, n);
    const auto masks = canonical_subset_order(full.size());
    const auto count = structure_count(signature, n);
    for (std::uint64_t index = 0; index < count; ++index) {
      const Structure m = structure_at(signature, n, index);
      ++result.structures_checked;
      std::vector<TeamEvaluator> evaluators;
      for (const auto& phi : gamma) evaluators.emplace_back(m, phi, full.vars(), options);
      // Row codes depend on each evaluator's layout.
      std::vector<std::vector<std::uint64_t>> codes;
      for (const auto& e : evaluators) codes.push_back(e.encode(full));
      for (auto mask : masks) {
        if (mask == 0) continue;
        ++result.teams_checked;
        bool all = true;
        for (std::size_t k = 0; k < evaluators.size() && all; ++k) {
          std::vector<std::uint64_t> sub;
          for (std::size_t r = 0; r < full.size(); ++r) {
            if ((mask >> r) & 1U) sub.push_back(codes[k][r]);
          }
          std::sort(sub.begin(), sub.end());
          all = evaluators[k].sat_encoded(sub);
        }
        if (all) {
          result.found = true;
          result.structure = m;
          result.team = subteam(full, mask);
          return result;
        }
      }
    }
  }
  return result;
}

Team substitute_team(const Structure& structure, const Team& team, const Term& t,
                     const std::string& x) {
  std::vector<std::string> vars = team.vars();
  auto col = team.column(x);
  if (!col) vars.push_back(x);
  const std::size_t target = col ? *col : vars.size() - 1;
  std::vector<Tuple> rows;
  rows.reserve(team.size());
  for (std::size_t r = 0; r < team.size(); ++r) {
    Tuple row = team.rows()[r];
    const Element value = term_eval(structure, team.assignment(r), t);
    if (col) {
      row[target] = value;
    } else {
      row.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  return Team(std::move(vars), std::move(rows));
}

SubstitutionCheck check_substitution(const Structure& structure, const Team& team,
                                     const Formula& phi, const Term& t, const std::string& x,
                                     const EvalOptions& options) {
  const Formula replaced = substitute(phi, t, x);
  SubstitutionCheck out;
  out.lhs = eval(structure, team, replaced, options);
  out.rhs = eval(structure, substitute_team(structure, team, t, x), phi, options);
  return out;
}

}  // namespace teamlog
