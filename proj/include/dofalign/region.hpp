#pragma once

#include "dofalign/demand.hpp"
#include "dofalign/rational.hpp"

#include <array>
#include <vector>

namespace dofalign {

// One half-space sum_{i in support} d_i <= bound, with the (receiver,
// excluded-complement-index) pairs that generated it. excluded == 0 marks a
// full-demand receiver (empty complement, no max term).
struct Inequality {
    std::vector<int> support;
    int bound = 0;
    std::vector<std::pair<int, int>> provenance;
};

using DofPoint = std::vector<Rational>;

struct RegionDescription {
    DemandSpec spec;
    std::vector<Inequality> inequalities;  // deduplicated by support, lex order
};

/// Expand the per-receiver max-form bounds into plain simplex-form half-spaces:
/// receiver j contributes support M_j ∪ {i} for every complement index i (just
/// M_j when the complement is empty). Duplicate supports are merged, keeping
/// all provenance. Everything is exact integer data.
RegionDescription expand_region(const DemandSpec& spec);

struct Membership {
    bool inside = false;
    std::vector<int> tight;     // indices into region.inequalities with equality
    std::vector<int> violated;  // indices with lhs > bound
    std::vector<int> negative;  // coordinates k with d_k < 0
};

/// Exact membership test. Throws std::invalid_argument on dimension mismatch.
Membership contains(const RegionDescription& region, const DofPoint& point);

struct VertexSet {
    std::vector<DofPoint> vertices;               // lexicographically sorted
    unsigned long long candidate_count = 0;       // K-subsets of constraints examined
};

/// Enumerate all vertices of {d >= 0} ∩ region exactly: every choice of K
/// constraints (inequalities turned into equalities plus coordinate planes)
/// with a unique solution is solved over the rationals and kept when feasible.
/// Feasible basic solutions are exactly the extreme points, and the origin is
/// always among them. Throws EnumerationLimitError when K > enumeration_limit.
VertexSet enumerate_vertices(const RegionDescription& region, int enumeration_limit = 8);

struct MaxSum {
    Rational total;
    DofPoint argmax;
};

/// Exact maximum of sum(d) over the region. For K <= enumeration_limit the
/// optimum is read off the vertex set; otherwise an exact-rational simplex is
/// used. Ties are broken toward the lexicographically largest maximizer in
/// both routes.
MaxSum max_sum_dof(const RegionDescription& region, int enumeration_limit = 8);

/// Total DoF M*K/(beta+1) of the symmetric configuration in which every prime
/// receiver demands beta messages and each message is demanded equally often.
/// Requires 1 <= beta <= K-1.
Rational symmetric_total(int K, int M, int beta);

/// Time-sharing weights ((d1-d2)/M, 2*d2/M, 1 - d1/M - d2/M) over the
/// single-user, equal-share and silent operating points of the K-user
/// interference channel. Requires d1 >= d2 >= 0 and d1 + d2 <= M.
std::array<Rational, 3> ic_timeshare_weights(const Rational& d1, const Rational& d2, int M);

/// Inclusion-maximal supports of the region: since all bounds equal M and the
/// coordinates are nonnegative, a support implies every subset support, so the
/// maximal ones describe the same feasible set with no redundancy.
std::vector<std::vector<int>> minimal_supports(const RegionDescription& region);

} // namespace dofalign
