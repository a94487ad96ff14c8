#pragma once

#include <vector>

#include "ogt/rational.hpp"

namespace ogt {

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
    LPStatus status = LPStatus::Infeasible;
    Rational value;
    std::vector<Rational> x;
};

// Exact two-phase simplex with Bland's rule:
//   minimize c.x  subject to  A x <= b,  x >= 0.
LPResult solve_lp(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                  const std::vector<Rational>& c);

} // namespace ogt
