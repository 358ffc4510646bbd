#include "dofalign/region.hpp"

#include "dofalign/errors.hpp"
#include "dofalign/exact_linalg.hpp"
#include "dofalign/simplex.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace dofalign {

RegionDescription expand_region(const DemandSpec& spec) {
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> by_support;
    for (const auto& meta : receiver_meta(spec)) {
        const auto& wanted = spec.demand(meta.receiver);
        if (meta.complement.empty()) {
            by_support[wanted].emplace_back(meta.receiver, 0);
            continue;
        }
        for (int i : meta.complement) {
            std::vector<int> support = wanted;
            support.insert(std::upper_bound(support.begin(), support.end(), i), i);
            by_support[support].emplace_back(meta.receiver, i);
        }
    }
    RegionDescription region;
    region.spec = spec;
    for (auto& [support, prov] : by_support) {
        Inequality ineq;
        ineq.support = support;
        ineq.bound = spec.M;
        ineq.provenance = std::move(prov);
        region.inequalities.push_back(std::move(ineq));
    }
    return region;
}

Membership contains(const RegionDescription& region, const DofPoint& point) {
    if (static_cast<int>(point.size()) != region.spec.K)
        throw std::invalid_argument("point has " + std::to_string(point.size()) +
                                    " components, spec has K=" + std::to_string(region.spec.K));
    Membership verdict;
    for (int k = 0; k < region.spec.K; ++k)
        if (point[static_cast<std::size_t>(k)] < 0) verdict.negative.push_back(k + 1);
    for (std::size_t idx = 0; idx < region.inequalities.size(); ++idx) {
        const auto& ineq = region.inequalities[idx];
        Rational lhs = 0;
        for (int i : ineq.support) lhs += point[static_cast<std::size_t>(i) - 1];
        if (lhs == ineq.bound)
            verdict.tight.push_back(static_cast<int>(idx));
        else if (lhs > ineq.bound)
            verdict.violated.push_back(static_cast<int>(idx));
    }
    verdict.inside = verdict.violated.empty() && verdict.negative.empty();
    return verdict;
}

namespace {

// Constraint rows for vertex enumeration: the expanded inequalities followed
// by the coordinate planes d_k = 0.
struct ConstraintRows {
    std::vector<std::vector<Rational>> coef;
    std::vector<Rational> rhs;
};

ConstraintRows constraint_rows(const RegionDescription& region) {
    const int K = region.spec.K;
    ConstraintRows rows;
    for (const auto& ineq : region.inequalities) {
        std::vector<Rational> row(static_cast<std::size_t>(K), Rational(0));
        for (int i : ineq.support) row[static_cast<std::size_t>(i) - 1] = 1;
        rows.coef.push_back(std::move(row));
        rows.rhs.push_back(Rational(ineq.bound));
    }
    for (int k = 0; k < K; ++k) {
        std::vector<Rational> row(static_cast<std::size_t>(K), Rational(0));
        row[static_cast<std::size_t>(k)] = 1;
        rows.coef.push_back(std::move(row));
        rows.rhs.push_back(Rational(0));
    }
    return rows;
}

bool lex_less(const DofPoint& a, const DofPoint& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

VertexSet enumerate_vertices(const RegionDescription& region, int enumeration_limit) {
    const int K = region.spec.K;
    if (K > enumeration_limit)
        throw EnumerationLimitError("K=" + std::to_string(K) +
                                    " exceeds the vertex enumeration limit " +
                                    std::to_string(enumeration_limit));
    ConstraintRows rows = constraint_rows(region);
    const std::size_t n = rows.coef.size();

    VertexSet out;
    std::vector<std::size_t> pick(static_cast<std::size_t>(K));
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    std::vector<DofPoint> found;
    for (;;) {
        ++out.candidate_count;
        RationalMatrix a;
        std::vector<Rational> b;
        for (std::size_t i : pick) {
            a.push_back(rows.coef[i]);
            b.push_back(rows.rhs[i]);
        }
        if (auto x = solve_exact(std::move(a), std::move(b))) {
            bool feasible = true;
            for (const auto& c : *x)
                if (c < 0) { feasible = false; break; }
            if (feasible) {
                for (const auto& ineq : region.inequalities) {
                    Rational lhs = 0;
                    for (int i : ineq.support) lhs += (*x)[static_cast<std::size_t>(i) - 1];
                    if (lhs > ineq.bound) { feasible = false; break; }
                }
            }
            if (feasible) found.push_back(std::move(*x));
        }
        // next K-combination of {0..n-1}
        int pos = K - 1;
        while (pos >= 0 && pick[static_cast<std::size_t>(pos)] ==
                               n - static_cast<std::size_t>(K - pos)) --pos;
        if (pos < 0) break;
        ++pick[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < K; ++i)
            pick[static_cast<std::size_t>(i)] = pick[static_cast<std::size_t>(i) - 1] + 1;
    }
    std::sort(found.begin(), found.end(), lex_less);
    found.erase(std::unique(found.begin(), found.end()), found.end());
    out.vertices = std::move(found);
    return out;
}

MaxSum max_sum_dof(const RegionDescription& region, int enumeration_limit) {
    const int K = region.spec.K;
    if (K <= enumeration_limit) {
        VertexSet vs = enumerate_vertices(region, enumeration_limit);
        MaxSum best;
        bool first = true;
        for (const auto& v : vs.vertices) {
            Rational total = 0;
            for (const auto& c : v) total += c;
            if (first || total > best.total ||
                (total == best.total && lex_less(best.argmax, v))) {
                best.total = total;
                best.argmax = v;
                first = false;
            }
        }
        return best;  // region always contains the origin, so never empty
    }
    ConstraintRows rows = constraint_rows(region);
    // Drop the coordinate planes: the simplex handles x >= 0 natively.
    rows.coef.resize(region.inequalities.size());
    rows.rhs.resize(region.inequalities.size());
    std::vector<std::vector<Rational>> objectives;
    objectives.emplace_back(static_cast<std::size_t>(K), Rational(1));
    for (int k = 0; k < K; ++k) {
        std::vector<Rational> row(static_cast<std::size_t>(K), Rational(0));
        row[static_cast<std::size_t>(k)] = 1;
        objectives.push_back(std::move(row));
    }
    SimplexResult res = simplex_lex_maximize(rows.coef, rows.rhs, objectives);
    MaxSum best;
    best.total = res.objective_values[0];
    best.argmax = res.x;
    return best;
}

Rational symmetric_total(int K, int M, int beta) {
    if (beta < 1 || beta > K - 1)
        throw std::invalid_argument("beta=" + std::to_string(beta) +
                                    " out of range 1.." + std::to_string(K - 1));
    return Rational(static_cast<long long>(M) * K, beta + 1);
}

std::array<Rational, 3> ic_timeshare_weights(const Rational& d1, const Rational& d2, int M) {
    if (d2 < 0 || d1 < d2) throw std::invalid_argument("require d1 >= d2 >= 0");
    if (d1 + d2 > M) throw std::invalid_argument("require d1 + d2 <= M");
    Rational m(M);
    return {(d1 - d2) / m, 2 * d2 / m, 1 - d1 / m - d2 / m};
}

std::vector<std::vector<int>> minimal_supports(const RegionDescription& region) {
    std::vector<std::vector<int>> out;
    for (const auto& ineq : region.inequalities) {
        bool dominated = false;
        for (const auto& other : region.inequalities) {
            if (other.support.size() > ineq.support.size() &&
                std::includes(other.support.begin(), other.support.end(),
                              ineq.support.begin(), ineq.support.end())) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(ineq.support);
    }
    return out;
}

} // namespace dofalign
