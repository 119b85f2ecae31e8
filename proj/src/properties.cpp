#include "teamlog/properties.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "teamlog/corpus.hpp"
#include "teamlog/errors.hpp"

namespace teamlog {

namespace {

constexpr std::size_t kMaxExhaustiveRows = 24;
constexpr std::size_t kMaxPairRows = 16;
constexpr std::size_t kMaxSampledRows = std::size_t{1} << 16;

using Selection = std::vector<bool>;

Team checked_full_team(const std::vector<std::string>& domain, std::size_t n) {
  std::size_t rows = 1;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    rows *= n;
    if (rows > kMaxSampledRows) throw BudgetExceeded("team space too large to sample");
  }
  return full_team(domain, n);
}

/// All subteams of the full team over a domain, addressed by row selections.
class TeamSpace {
 public:
  TeamSpace(const Structure& structure, const Formula& phi, const std::vector<std::string>& domain,
            const EvalOptions& options)
      : full_(checked_full_team(domain, structure.size())),
        evaluator_(structure, phi, full_.vars(), options),
        codes_(evaluator_.encode(full_)) {}

  std::size_t rows() const { return full_.size(); }
  const Team& full() const { return full_; }

  bool sat(const Selection& selection) {
    std::vector<std::uint64_t> sub;
    for (std::size_t r = 0; r < codes_.size(); ++r) {
      if (selection[r]) sub.push_back(codes_[r]);
    }
    return evaluator_.sat_encoded(sub);
  }

  bool sat_mask(std::uint64_t mask) { return sat(from_mask(mask)); }

  Selection from_mask(std::uint64_t mask) const {
    Selection out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = ((mask >> r) & 1U) != 0;
    return out;
  }

  Team team(const Selection& selection) const {
    std::vector<Tuple> picked;
    for (std::size_t r = 0; r < rows(); ++r) {
      if (selection[r]) picked.push_back(full_.rows()[r]);
    }
    return Team(full_.vars(), std::move(picked));
  }

  Team team_mask(std::uint64_t mask) const { return team(from_mask(mask)); }

  /// Satisfaction of every subteam, indexed by mask.
  std::vector<bool> table() {
    std::vector<bool> out(std::size_t{1} << rows());
    for (std::uint64_t mask = 0; mask < out.size(); ++mask) out[mask] = sat_mask(mask);
    return out;
  }

  Selection random(Rng& rng) const {
    Selection out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = pick(rng, 2) == 1;
    return out;
  }

 private:
  Team full_;
  TeamEvaluator evaluator_;
  std::vector<std::uint64_t> codes_;
};

bool exhaustive_fits(std::size_t rows, std::uint64_t budget, std::size_t limit) {
  return rows <= limit && (std::uint64_t{1} << rows) <= budget;
}

PropertyVerdict start(std::string name, bool exhaustive, const PropertyOptions& options) {
  PropertyVerdict verdict;
  verdict.property = std::move(name);
  verdict.coverage = exhaustive ? Coverage::kExhaustive : Coverage::kRandomized;
  if (!exhaustive) {
    verdict.seed = options.seed;
    verdict.trials = options.trials;
  }
  return verdict;
}

void fail(PropertyVerdict& verdict, const Structure& structure, std::vector<Team> teams,
          std::string note) {
  verdict.holds = false;
  verdict.counterexample = Counterexample{structure, std::move(teams), std::move(note)};
}

void require_domain(const Formula& phi, const std::vector<std::string>& domain) {
  for (const auto& v : free_vars(phi)) {
    if (std::find(domain.begin(), domain.end(), v) == domain.end()) {
      throw Error(ErrorKind::kUnbound, "free variable '" + v + "' is not in the checked domain");
    }
  }
}

Team singleton(const Team& x, std::size_t row) { return Team(x.vars(), {x.rows()[row]}); }

}  // namespace

PropertyVerdict check_empty_team(const Structure& structure, const Formula& phi,
                                 const PropertyOptions& options) {
  if (!options.force && !fragment_of(phi).in_fo_c()) {
    throw Error(ErrorKind::kFragment,
                "the empty-team check covers FO(dep, indep, inc, excl) only; use force to override");
  }
  auto verdict = start("empty-team", true, options);
  const Team empty(free_var_list(phi), {});
  verdict.checked = 1;
  if (!eval(structure, empty, phi, options.eval)) {
    fail(verdict, structure, {empty}, "the empty team does not satisfy the formula");
  }
  return verdict;
}

PropertyVerdict check_downward(const Structure& structure, const Formula& phi,
                               const std::vector<std::string>& domain,
                               const PropertyOptions& options) {
  require_domain(phi, domain);
  TeamSpace space(structure, phi, domain, options.eval);
  const std::size_t rows = space.rows();
  const bool exhaustive = exhaustive_fits(rows, options.budget, kMaxExhaustiveRows);
  auto verdict = start("downward-closure", exhaustive, options);
  const char* note = "X satisfies the formula but its subteam Y does not";
  if (exhaustive) {
    const auto table = space.table();
    // A failing pair Y ⊆ X implies a failing pair one row apart.
    for (auto mask : canonical_subset_order(rows)) {
      if (!table[mask]) continue;
      for (std::size_t r = rows; r-- > 0;) {
        if (!((mask >> r) & 1U)) continue;
        const auto sub = mask & ~(std::uint64_t{1} << r);
        ++verdict.checked;
        if (!table[sub]) {
          fail(verdict, structure, {space.team_mask(mask), space.team_mask(sub)}, note);
          return verdict;
        }
      }
    }
    return verdict;
  }
  Rng rng(options.seed);
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    const auto x = space.random(rng);
    if (!space.sat(x)) continue;
    auto y = x;
    for (std::size_t r = 0; r < rows; ++r) y[r] = x[r] && pick(rng, 2) == 1;
    ++verdict.checked;
    if (!space.sat(y)) {
      fail(verdict, structure, {space.team(x), space.team(y)}, note);
      return verdict;
    }
  }
  return verdict;
}

PropertyVerdict check_union_closure(const Structure& structure, const Formula& phi,
                                    const std::vector<std::string>& domain,
                                    const PropertyOptions& options) {
  require_domain(phi, domain);
  TeamSpace space(structure, phi, domain, options.eval);
  const std::size_t rows = space.rows();
  const bool exhaustive = exhaustive_fits(rows, options.budget, kMaxPairRows);
  auto verdict = start("union-closure", exhaustive, options);
  const char* note = "X and Y satisfy the formula but their union does not";
  if (exhaustive) {
    const auto table = space.table();
    std::vector<std::uint64_t> satisfying;
    for (auto mask : canonical_subset_order(rows)) {
      if (mask != 0 && table[mask]) satisfying.push_back(mask);
    }
    for (std::size_t i = 0; i < satisfying.size(); ++i) {
      for (std::size_t j = i + 1; j < satisfying.size(); ++j) {
        ++verdict.checked;
        if (!table[satisfying[i] | satisfying[j]]) {
          fail(verdict, structure, {space.team_mask(satisfying[i]), space.team_mask(satisfying[j])},
               note);
          return verdict;
        }
      }
    }
    return verdict;
  }
  Rng rng(options.seed);
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    const auto x = space.random(rng);
    const auto y = space.random(rng);
    if (!space.sat(x) || !space.sat(y)) continue;
    Selection both(rows);
    for (std::size_t r = 0; r < rows; ++r) both[r] = x[r] || y[r];
    ++verdict.checked;
    if (!space.sat(both)) {
      fail(verdict, structure, {space.team(x), space.team(y)}, note);
      return verdict;
    }
  }
  return verdict;
}

PropertyVerdict check_flatness(const Structure& structure, const Formula& phi,
                               const std::vector<std::string>& domain,
                               const PropertyOptions& options) {
  require_domain(phi, domain);
  TeamSpace space(structure, phi, domain, options.eval);
  const std::size_t rows = space.rows();
  const bool exhaustive = exhaustive_fits(rows, options.budget, kMaxExhaustiveRows);
  auto verdict = start("flatness", exhaustive, options);
  std::vector<bool> single(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    Selection s(rows);
    s[r] = true;
    single[r] = space.sat(s);
  }
  auto examine = [&](const Selection& x, bool value) {
    ++verdict.checked;
    std::optional<std::size_t> failing;
    for (std::size_t r = 0; r < rows && !failing; ++r) {
      if (x[r] && !single[r]) failing = r;
    }
    if (value == !failing.has_value()) return true;
    const Team team = space.team(x);
    std::vector<Team> teams = {team};
    if (failing) teams.push_back(singleton(space.full(), *failing));
    fail(verdict, structure, std::move(teams),
         value ? "X satisfies the formula but one of its assignments does not"
               : "every assignment of X satisfies the formula but X does not");
    return false;
  };
  if (exhaustive) {
    const auto table = space.table();
    for (auto mask : canonical_subset_order(rows)) {
      if (!examine(space.from_mask(mask), table[mask])) return verdict;
    }
    return verdict;
  }
  Rng rng(options.seed);
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    const auto x = space.random(rng);
    if (!examine(x, space.sat(x))) return verdict;
  }
  return verdict;
}

PropertyVerdict check_locality(const Structure& structure, const Formula& phi,
                               const std::vector<std::string>& domain,
                               const PropertyOptions& options) {
  require_domain(phi, domain);
  const auto fv = free_var_list(phi);
  std::set<std::string> distinct(domain.begin(), domain.end());
  if (distinct.size() <= fv.size()) {
    throw Error(ErrorKind::kPrecondition, "locality needs a domain strictly larger than Fv");
  }
  TeamSpace big(structure, phi, domain, options.eval);
  TeamSpace small(structure, phi, fv, options.eval);
  const std::size_t rows = big.rows();
  // Row of the restricted full team for each row of the big one.
  std::vector<std::size_t> image(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto s = big.full().assignment(r);
    Tuple restricted;
    for (const auto& v : fv) restricted.push_back(*s.lookup(v));
    const auto& small_rows = small.full().rows();
    image[r] = static_cast<std::size_t>(
        std::lower_bound(small_rows.begin(), small_rows.end(), restricted) - small_rows.begin());
  }
  const bool exhaustive = exhaustive_fits(rows, options.budget / 2, kMaxExhaustiveRows);
  auto verdict = start("locality", exhaustive, options);
  std::vector<bool> small_table;
  if (exhaustive) small_table = small.table();
  auto examine = [&](const Selection& x, bool value) {
    ++verdict.checked;
    Selection r(small.rows());
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (x[i]) {
        r[image[i]] = true;
        mask |= std::uint64_t{1} << image[i];
      }
    }
    const bool restricted = exhaustive ? small_table[mask] : small.sat(r);
    if (value == restricted) return true;
    fail(verdict, structure, {big.team(x), small.team(r)},
         value ? "X satisfies the formula but its restriction to Fv does not"
               : "the restriction to Fv satisfies the formula but X does not");
    return false;
  };
  if (exhaustive) {
    for (auto mask : canonical_subset_order(rows)) {
      if (!examine(big.from_mask(mask), big.sat_mask(mask))) return verdict;
    }
    return verdict;
  }
  Rng rng(options.seed);
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    const auto x = big.random(rng);
    if (!examine(x, big.sat(x))) return verdict;
  }
  return verdict;
}

bool reverify(const PropertyVerdict& verdict, const Formula& phi, const EvalOptions& options) {
  if (verdict.holds || !verdict.counterexample) return false;
  const auto& cx = *verdict.counterexample;
  const auto& m = cx.structure;
  const auto& teams = cx.teams;
  auto sat = [&](const Team& x) { return eval(m, x, phi, options); };
  if (verdict.property == "empty-team") {
    return teams.size() == 1 && teams[0].empty() && !sat(teams[0]);
  }
  if (verdict.property == "downward-closure") {
    return teams.size() == 2 && team_intersection(teams[0], teams[1]) == teams[1] &&
           sat(teams[0]) && !sat(teams[1]);
  }
  if (verdict.property == "union-closure") {
    return teams.size() == 2 && sat(teams[0]) && sat(teams[1]) &&
           !sat(team_union(teams[0], teams[1]));
  }
  if (verdict.property == "flatness") {
    if (teams.empty()) return false;
    bool pointwise = true;
    for (std::size_t r = 0; r < teams[0].size(); ++r) {
      pointwise = pointwise && sat(singleton(teams[0], r));
    }
    return sat(teams[0]) != pointwise;
  }
  if (verdict.property == "locality") {
    if (teams.size() != 2) return false;
    const auto fv = free_vars(phi);
    return restrict(teams[0], fv) == teams[1] && sat(teams[0]) != sat(teams[1]);
  }
  return false;
}

}  // namespace teamlog
