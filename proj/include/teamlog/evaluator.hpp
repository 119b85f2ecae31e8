#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/formula.hpp"

namespace teamlog {

/// TEAMLOG_BUDGET when set to a positive integer, otherwise 50 million.
std::uint64_t default_call_budget();

struct EvalOptions {
  bool memoize = true;
  /// Search reductions licensed by downward and union closure of subformulas.
  /// Off means every clause is searched exactly as defined.
  bool prune = true;
  std::uint64_t max_calls = default_call_budget();
  /// Largest team on which tensor or subteam searches are attempted.
  std::size_t max_split_rows = 16;
};

struct EvalStats {
  std::uint64_t calls = 0;
  std::uint64_t memo_hits = 0;
};

/// Witness for the root connective of a true verdict.
struct Certificate {
  enum class Kind { kNone, kCover, kSupplement, kElement };
  Kind kind = Kind::kNone;
  Team left;
  Team right;
  std::string var;
  /// One image per row of the evaluated team, aligned with its rows.
  std::vector<std::vector<Element>> images;
  Element element = 0;
};

struct EvalResult {
  bool value = false;
  Certificate certificate;
  EvalStats stats;
};

/// Satisfaction M ⊨_X φ for a fixed structure, formula, and team domain.
/// Compilation happens once; each call evaluates one team.
class TeamEvaluator {
 public:
  TeamEvaluator(const Structure& structure, const Formula& phi,
                std::vector<std::string> team_vars, EvalOptions options = {});
  ~TeamEvaluator();
  TeamEvaluator(TeamEvaluator&&) noexcept;
  TeamEvaluator& operator=(TeamEvaluator&&) noexcept;

  bool sat(const Team& team);
  EvalResult sat_with_certificate(const Team& team);

  /// Row codes of a team over the evaluator's domain, sorted ascending.
  std::vector<std::uint64_t> encode(const Team& team) const;
  /// Evaluates a team given as sorted, duplicate-free row codes.
  bool sat_encoded(std::span<const std::uint64_t> codes);

  const std::vector<std::string>& team_vars() const;
  const EvalStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool eval(const Structure& structure, const Team& team, const Formula& phi,
          const EvalOptions& options = {});
EvalResult eval_with_certificate(const Structure& structure, const Team& team,
                                 const Formula& phi, const EvalOptions& options = {});
/// Re-checks a certificate against the clause of the root connective.
bool verify_certificate(const Structure& structure, const Team& team, const Formula& phi,
                        const Certificate& certificate, const EvalOptions& options = {});

/// Tarski satisfaction of a first-order formula by one assignment.
bool tarski(const Structure& structure, const Assignment& assignment, const Formula& phi);
/// Per-assignment evaluation; throws kFragment unless φ is first-order.
bool eval_flat_fo(const Structure& structure, const Team& team, const Formula& phi);

/// All nonempty teams over D satisfying φ, in (size, mask) order over the
/// rows of the full team. The team space n^|D| must not exceed max_rows.
std::vector<Team> sat_teams(const Structure& structure, const Formula& phi,
                            const std::vector<std::string>& domain,
                            const EvalOptions& options = {}, std::size_t max_rows = 16);

struct SatSearchResult {
  bool found = false;
  std::optional<Structure> structure;
  std::optional<Team> team;
  std::size_t structures_checked = 0;
  std::uint64_t teams_checked = 0;
};

/// First labeled structure of size 1..max_n with a nonempty team over ⋃Fv(Γ)
/// satisfying every formula.
SatSearchResult sat_search(const std::vector<Formula>& gamma, const Signature& signature,
                           std::size_t max_n, const EvalOptions& options = {});

/// X(t/x) = {s(s(t)/x) : s ∈ X}.
Team substitute_team(const Structure& structure, const Team& team, const Term& t,
                     const std::string& x);

struct SubstitutionCheck {
  bool lhs = false;  // M ⊨_X φ(t/x)
  bool rhs = false;  // M ⊨_{X(t/x)} φ
  bool agree() const noexcept { return lhs == rhs; }
};

SubstitutionCheck check_substitution(const Structure& structure, const Team& team,
                                     const Formula& phi, const Term& t, const std::string& x,
                                     const EvalOptions& options = {});

}  // namespace teamlog
