#pragma once

#include "dofalign/rational.hpp"

#include <vector>

namespace dofalign {

struct SimplexResult {
    std::vector<Rational> objective_values;  // one per objective row, at the optimum
    std::vector<Rational> x;                 // optimal structural variables
};

/// Exact-rational simplex over {A x <= b, x >= 0} with b >= 0 (the slack basis
/// is feasible, so no phase-1 is needed). Maximizes the objective rows
/// lexicographically: the first row is the primary objective, later rows break
/// ties among its maximizers in order. Uses Bland's rule; throws
/// std::invalid_argument on negative b and std::runtime_error on an unbounded
/// direction.
SimplexResult simplex_lex_maximize(const std::vector<std::vector<Rational>>& a,
                                   const std::vector<Rational>& b,
                                   const std::vector<std::vector<Rational>>& objectives);

} // namespace dofalign
