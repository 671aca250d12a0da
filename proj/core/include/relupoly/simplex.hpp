#pragma once

#include "relupoly/linalg.hpp"
#include "relupoly/rational.hpp"

namespace relupoly {

enum class LpStatus { Infeasible, Optimal, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  RatVec x;   // a maximizer (or feasible witness) when Optimal
  Rat value;  // objective value when Optimal
};

// maximize c.x  subject to  G x + g >= 0,  E x + e = 0,  x free.
// Exact two-phase simplex with Bland's rule; always terminates.
LpResult lp_solve(const RatMat& G, const RatVec& g, const RatMat& E, const RatVec& e,
                  const RatVec& c);

}  // namespace relupoly
