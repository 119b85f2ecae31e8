#include <cstdio>
#include <cstdlib>
#include <string>

#include "teamlog/errors.hpp"
#include "teamlog/suites.hpp"

// One PASS/FAIL line per criterion. A suite passes when every check holds
// exactly and it finishes within its time limit.
int main(int argc, char** argv) {
  teamlog::SuiteOptions options;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      options.seed = std::stoull(argv[++i]);
    } else if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--seed N] [--only SUITE]\n");
      return 2;
    }
  }
  int failed = 0;
  for (const auto& info : teamlog::suite_catalog()) {
    if (!only.empty() && only != info.name) continue;
    try {
      const auto r = teamlog::run_suite(info.name, options);
      std::printf("%s criterion %d (%s): %s; %.2fs of %.0fs allowed\n", r.pass() ? "PASS" : "FAIL",
                  info.criterion, info.name.c_str(), r.detail.c_str(), r.seconds,
                  info.limit_seconds);
      if (!r.pass()) {
        ++failed;
        if (r.data.contains("first_failures")) {
          std::printf("  first failures: %s\n", r.data["first_failures"].dump().c_str());
        }
      }
    } catch (const teamlog::Error& e) {
      ++failed;
      std::printf("FAIL criterion %d (%s): %s error: %s\n", info.criterion, info.name.c_str(),
                  std::string(teamlog::to_string(e.kind())).c_str(), e.what());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
