#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/formula.hpp"

namespace teamlog {

enum class Coverage { kExhaustive, kRandomized };

/// Teams witnessing a failed property, with the roles of the teams:
///   empty-team  {∅}
///   downward    {X, Y}     Y ⊆ X, X satisfies, Y does not
///   union       {X, Y}     both satisfy, X ∪ Y does not
///   flatness    {X, s}     verdict on X differs from the conjunction of
///                          singleton verdicts; s is a failing singleton or
///                          absent when every singleton satisfies
///   locality    {X, X↾Fv}  verdicts differ
struct Counterexample {
  Structure structure;
  std::vector<Team> teams;
  std::string note;
};

struct PropertyVerdict {
  std::string property;
  bool holds = true;
  std::optional<Counterexample> counterexample;
  Coverage coverage = Coverage::kExhaustive;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  /// Teams (or team pairs) examined.
  std::uint64_t checked = 0;
};

struct PropertyOptions {
  EvalOptions eval;
  /// Team evaluations allowed for an exhaustive run; beyond it the checker
  /// samples `trials` random candidates instead.
  std::uint64_t budget = std::uint64_t{1} << 20;
  std::uint64_t seed = 0;
  std::uint64_t trials = 2000;
  /// Run the empty-team check outside FO(dep, ⊥_c, ⊆, |).
  bool force = false;
};

PropertyVerdict check_empty_team(const Structure& structure, const Formula& phi,
                                 const PropertyOptions& options = {});
PropertyVerdict check_downward(const Structure& structure, const Formula& phi,
                               const std::vector<std::string>& domain,
                               const PropertyOptions& options = {});
PropertyVerdict check_union_closure(const Structure& structure, const Formula& phi,
                                    const std::vector<std::string>& domain,
                                    const PropertyOptions& options = {});
PropertyVerdict check_flatness(const Structure& structure, const Formula& phi,
                               const std::vector<std::string>& domain,
                               const PropertyOptions& options = {});
/// The domain must strictly contain Fv(φ).
PropertyVerdict check_locality(const Structure& structure, const Formula& phi,
                               const std::vector<std::string>& domain,
                               const PropertyOptions& options = {});

/// Re-evaluates a counterexample from scratch; true when it does witness the
/// failure of the named property.
bool reverify(const PropertyVerdict& verdict, const Formula& phi,
              const EvalOptions& options = {});

}  // namespace teamlog
