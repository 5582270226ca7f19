#pragma once

#include <utility>
#include <vector>

#include "frtk/rational.hpp"

namespace frtk {

// Linear program in free variables:
//   maximize objective^T x
//   subject to  a^T x  = rhs   (equalities)
//               a^T x >= rhs   (inequalities_geq)
// Nonnegativity is not implicit; callers add x_i >= 0 rows when wanted.
struct LpTask {
  int num_vars = 0;
  RatVec objective;
  std::vector<std::pair<RatVec, Rational>> equalities;
  std::vector<std::pair<RatVec, Rational>> inequalities_geq;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;  // meaningful iff Optimal
  RatVec point;    // meaningful iff Optimal
};

// Exact two-phase primal simplex. Deterministic: identical tasks give
// identical results, including the chosen optimal vertex. Throws
// MalformedTask on inconsistent dimensions.
LpResult lp_solve(const LpTask& task);

}  // namespace frtk
