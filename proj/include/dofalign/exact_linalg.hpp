#pragma once

#include "dofalign/rational.hpp"

#include <optional>
#include <vector>

namespace dofalign {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Solve the square system A x = b over the rationals by Gaussian elimination.
/// Returns nothing when A is singular.
std::optional<std::vector<Rational>> solve_exact(RationalMatrix a, std::vector<Rational> b);

/// Rank of an arbitrary rational matrix.
int rank_exact(RationalMatrix a);

} // namespace dofalign
