#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teamlog/compactness.hpp"
#include "teamlog/corpus.hpp"
#include "teamlog/eso.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/io.hpp"

namespace teamlog {

struct SuiteInfo {
  std::string name;
  int criterion = 0;
  std::string title;
  /// Wall-clock limit in seconds; exceeding it fails the suite.
  double limit_seconds = 0;
};

/// The nine acceptance suites in criterion order.
const std::vector<SuiteInfo>& suite_catalog();
std::optional<SuiteInfo> find_suite(std::string_view name);

struct SuiteOptions {
  std::uint64_t seed = 7;
  EvalOptions eval;
  EsoOptions eso;
};

struct SuiteReport {
  SuiteInfo info;
  std::uint64_t seed = 0;
  /// Every checked instance came out as expected.
  bool correct = false;
  double seconds = 0;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string detail;
  /// Suite-specific counts and the first failures, if any.
  Json data;

  bool pass() const noexcept { return correct && seconds <= info.limit_seconds; }
};

/// Throws kValidation for an unknown name.
SuiteReport run_suite(std::string_view name, const SuiteOptions& options = {});

Json report_to_json(const SuiteReport& report);

/// A seeded (M, Y, Γ) with κ ≤ 3, |Γ| ≤ 2, n ≤ 3, Y ⊨ Γ, Y nonempty over the
/// whole enumeration, and every ESO prefix relation of Γ within `max_cells`
/// at that n. Nothing after a bounded number of attempts.
struct GammaInstance {
  Structure structure;
  Team team;
  GammaSpec gamma;
};
std::optional<GammaInstance> random_gamma_instance(Rng& rng, std::size_t max_cells = 16);

/// Three pairwise-coherent constraints on x0, x1, x2 with no common
/// completion; the family stops below {0,1,2}.
CoherenceSystem triangle_system();

}  // namespace teamlog
