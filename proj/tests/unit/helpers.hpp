#pragma once

#include <map>
#include <string>
#include <vector>

#include "teamlog/core_model.hpp"
#include "teamlog/errors.hpp"
#include "teamlog/evaluator.hpp"
#include "teamlog/formula.hpp"
#include "teamlog/parser.hpp"

namespace testing {

using namespace teamlog;

inline Formula F(const std::string& text, const Signature* signature = nullptr) {
  ParseOptions options;
  options.signature = signature;
  return parse(text, options);
}

inline Structure make_structure(const Signature& signature, std::size_t n,
                                const std::map<std::string, std::vector<Tuple>>& relations = {}) {
  Structure m(signature, n);
  for (const auto& [name, tuples] : relations) {
    const auto index = *signature.relation_index(name);
    for (const auto& t : tuples) m.set_relation(index, t, true);
  }
  return m;
}

/// Strict linear order lt on {0..n-1}.
inline Structure linear_order(std::size_t n) {
  Signature sig({{"lt", 2}}, {});
  Structure m(sig, n);
  for (Element a = 0; a < n; ++a) {
    for (Element b = a + 1; b < n; ++b) m.set_relation(0, Tuple{a, b}, true);
  }
  return m;
}

inline Tuple values(const Team& x, std::size_t row, const std::vector<std::string>& vars) {
  const auto s = x.assignment(row);
  Tuple out;
  for (const auto& v : vars) out.push_back(*s.lookup(v));
  return out;
}

/// Satisfaction computed by enumerating exactly the objects each clause
/// quantifies over: all subteam pairs, all supplement functions, all triples
/// of assignments. Exponential; for teams of a few rows only.
inline bool naive_sat(const Structure& m, const Team& x, const Formula& phi) {
  const std::size_t rows = x.size();
  const std::uint64_t full = (std::uint64_t{1} << rows) - 1;
  const std::size_t n = m.size();
  switch (phi.op) {
    case Op::kEq:
    case Op::kNeq:
    case Op::kRel:
    case Op::kNegRel:
      for (std::size_t r = 0; r < rows; ++r) {
        if (!tarski(m, x.assignment(r), phi)) return false;
      }
      return true;
    case Op::kDep:
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < rows; ++j) {
          if (values(x, i, phi.xs) == values(x, j, phi.xs) &&
              values(x, i, phi.ys) != values(x, j, phi.ys)) {
            return false;
          }
        }
      }
      return true;
    case Op::kInc:
      for (std::size_t i = 0; i < rows; ++i) {
        bool found = false;
        for (std::size_t j = 0; j < rows && !found; ++j) {
          found = values(x, i, phi.xs) == values(x, j, phi.ys);
        }
        if (!found) return false;
      }
      return true;
    case Op::kExcl:
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < rows; ++j) {
          if (values(x, i, phi.xs) == values(x, j, phi.ys)) return false;
        }
      }
      return true;
    case Op::kIndep: {
      auto xz = phi.xs;
      xz.insert(xz.end(), phi.zs.begin(), phi.zs.end());
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < rows; ++j) {
          if (values(x, i, phi.zs) != values(x, j, phi.zs)) continue;
          bool found = false;
          for (std::size_t k = 0; k < rows && !found; ++k) {
            found = values(x, k, xz) == values(x, i, xz) &&
                    values(x, k, phi.ys) == values(x, j, phi.ys);
          }
          if (!found) return false;
        }
      }
      return true;
    }
    case Op::kAnd:
      return naive_sat(m, x, phi.left()) && naive_sat(m, x, phi.right());
    case Op::kOr:
      for (std::uint64_t y = 0; y <= full; ++y) {
        for (std::uint64_t z = 0; z <= full; ++z) {
          if ((y | z) == full && naive_sat(m, subteam(x, y), phi.left()) &&
              naive_sat(m, subteam(x, z), phi.right())) {
            return true;
          }
        }
      }
      return false;
    case Op::kOrStrict:
      for (std::uint64_t y = 0; y <= full; ++y) {
        if (naive_sat(m, subteam(x, y), phi.left()) &&
            naive_sat(m, subteam(x, full & ~y), phi.right())) {
          return true;
        }
      }
      return false;
    case Op::kIntOr:
      return naive_sat(m, x, phi.left()) || naive_sat(m, x, phi.right());
    case Op::kImpl:
      for (std::uint64_t y = 0; y <= full; ++y) {
        const Team sub = subteam(x, y);
        if (naive_sat(m, sub, phi.left()) && !naive_sat(m, sub, phi.right())) return false;
      }
      return true;
    case Op::kWeakNeg:
      return x.empty() || !naive_sat(m, x, phi.body());
    case Op::kClassNeg:
      return !naive_sat(m, x, phi.body());
    case Op::kExists:
    case Op::kExistsStrict: {
      // Images as masks over the domain; strict allows singletons only.
      std::vector<std::uint64_t> images;
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        if (phi.op == Op::kExists || (mask & (mask - 1)) == 0) images.push_back(mask);
      }
      std::vector<std::size_t> choice(rows, 0);
      for (;;) {
        std::vector<std::vector<Element>> f(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          for (Element a = 0; a < n; ++a) {
            if ((images[choice[r]] >> a) & 1U) f[r].push_back(a);
          }
        }
        if (naive_sat(m, supplement(x, phi.var, SupplementFunction(x, f, n)), phi.body())) {
          return true;
        }
        std::size_t r = 0;
        while (r < rows && ++choice[r] == images.size()) choice[r++] = 0;
        if (r == rows) return false;
      }
    }
    case Op::kForall:
      return naive_sat(m, duplicate(x, phi.var, m), phi.body());
    case Op::kExists1:
      for (Element a = 0; a < n; ++a) {
        if (naive_sat(m, supplement_const(x, phi.var, a, m), phi.body())) return true;
      }
      return false;
    case Op::kForall1:
      for (Element a = 0; a < n; ++a) {
        if (!naive_sat(m, supplement_const(x, phi.var, a, m), phi.body())) return false;
      }
      return true;
  }
  return false;
}

inline EvalOptions unpruned() {
  EvalOptions options;
  options.prune = false;
  return options;
}

inline EvalOptions unmemoized() {
  EvalOptions options;
  options.memoize = false;
  return options;
}

}  // namespace testing
