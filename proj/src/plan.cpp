#include "dofalign/plan.hpp"

#include "dofalign/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dofalign {

namespace {

long long checked_mul(long long a, long long b, long long cap, const char* what) {
    if (a != 0 && b > std::numeric_limits<long long>::max() / a)
        throw CapExceededError(std::string(what) + " overflows 64-bit arithmetic");
    long long r = a * b;
    if (r > cap)
        throw CapExceededError(std::string(what) + "=" + std::to_string(r) +
                               " exceeds the cap " + std::to_string(cap));
    return r;
}

long long checked_pow(long long base, int exp, long long cap, const char* what) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base, cap, what);
    return r;
}

} // namespace

IntegerizedPoint integerize(const DofPoint& point) {
    Integer kappa = 1;
    for (const auto& d : point) {
        if (d < 0) throw std::invalid_argument("DoF point has a negative component");
        kappa = lcm(kappa, denominator(d));
    }
    if (kappa > std::numeric_limits<long long>::max())
        throw std::overflow_error("integerization factor kappa does not fit 64 bits");

    IntegerizedPoint ip;
    ip.kappa = kappa.convert_to<long long>();
    const int K = static_cast<int>(point.size());
    std::vector<Integer> scaled(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        scaled[static_cast<std::size_t>(k)] =
            numerator(point[static_cast<std::size_t>(k)]) *
            (kappa / denominator(point[static_cast<std::size_t>(k)]));
        if (scaled[static_cast<std::size_t>(k)] > std::numeric_limits<long long>::max())
            throw std::overflow_error("integerized DoF does not fit 64 bits");
    }

    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scaled[static_cast<std::size_t>(a)] > scaled[static_cast<std::size_t>(b)];
    });
    ip.dbar.resize(static_cast<std::size_t>(K));
    ip.perm.resize(static_cast<std::size_t>(K));
    for (int pos = 0; pos < K; ++pos) {
        int orig = order[static_cast<std::size_t>(pos)];
        ip.dbar[static_cast<std::size_t>(pos)] =
            scaled[static_cast<std::size_t>(orig)].convert_to<long long>();
        ip.perm[static_cast<std::size_t>(orig)] = pos + 1;
    }
    return ip;
}

DemandSpec permute_messages(const DemandSpec& spec, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != spec.K)
        throw std::invalid_argument("permutation size does not match K");
    std::vector<std::vector<int>> demands;
    demands.reserve(spec.demands.size());
    for (const auto& set : spec.demands) {
        std::vector<int> relabeled;
        relabeled.reserve(set.size());
        for (int k : set) relabeled.push_back(perm[static_cast<std::size_t>(k) - 1]);
        std::sort(relabeled.begin(), relabeled.end());
        demands.push_back(std::move(relabeled));
    }
    return make_spec(spec.K, spec.M, std::move(demands));
}

std::vector<AlignmentConstraint> build_constraints(const DemandSpec& spec, bool grouped) {
    std::vector<int> receivers;
    if (grouped) {
        receivers = compute_grouping(spec).primes;
        std::sort(receivers.begin(), receivers.end());
    } else {
        receivers.resize(static_cast<std::size_t>(spec.J));
        std::iota(receivers.begin(), receivers.end(), 1);
    }
    auto metas = receiver_meta(spec);
    std::vector<AlignmentConstraint> out;
    for (int j : receivers) {
        const auto& meta = metas[static_cast<std::size_t>(j) - 1];
        if (!meta.delta) continue;
        for (int n : meta.complement)
            if (n > *meta.delta) out.push_back({*meta.delta, n, j});
    }
    // receivers ascend and complements are sorted, so this is (j, n) order
    return out;
}

std::vector<MultiAlignmentConstraint> build_multi_constraints(const DemandSpec& spec,
                                                              bool grouped) {
    std::vector<MultiAlignmentConstraint> out;
    for (const auto& c : build_constraints(spec, grouped))
        for (int p = 1; p <= spec.M; ++p)
            for (int q = 1; q <= spec.M; ++q) out.push_back({c.m, c.n, c.j, p, q});
    return out;
}

BeamPlan build_plan(const DemandSpec& spec, const IntegerizedPoint& ip, int l,
                    const std::vector<AlignmentConstraint>& constraints, long long tau_cap) {
    if (l < 1) throw std::invalid_argument("l must be >= 1");
    BeamPlan plan;
    plan.spec = spec;
    plan.constraints = constraints;
    plan.l = l;
    plan.kappa = ip.kappa;
    plan.dbar = ip.dbar;
    plan.gamma = static_cast<int>(constraints.size());
    plan.gamma_k.resize(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) {
        int count = 0;
        for (const auto& c : constraints)
            if (c.n <= k) ++count;
        plan.gamma_k[static_cast<std::size_t>(k) - 1] = count;
    }
    plan.tau = checked_mul(ip.kappa, checked_pow(l + 1, plan.gamma, tau_cap, "tau"),
                           tau_cap, "tau");

    plan.columns.resize(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) {
        auto& cols = plan.columns[static_cast<std::size_t>(k) - 1];
        std::vector<int> hi(constraints.size());
        for (std::size_t c = 0; c < constraints.size(); ++c)
            hi[c] = constraints[c].n > k ? l : l - 1;
        for (long long base = 1; base <= ip.dbar[static_cast<std::size_t>(k) - 1]; ++base) {
            std::vector<int> alpha(constraints.size(), 0);
            for (;;) {
                cols.push_back({static_cast<int>(base), alpha});
                // odometer: last constraint varies fastest
                std::size_t pos = constraints.size();
                while (pos > 0 && alpha[pos - 1] == hi[pos - 1]) {
                    alpha[pos - 1] = 0;
                    --pos;
                }
                if (pos == 0) break;
                ++alpha[pos - 1];
            }
        }
    }
    return plan;
}

std::map<ColumnKey, int> column_index(const BeamPlan& plan, int k) {
    std::map<ColumnKey, int> map;
    const auto& cols = plan.columns[static_cast<std::size_t>(k) - 1];
    for (std::size_t i = 0; i < cols.size(); ++i)
        map.emplace(ColumnKey{cols[i].base, cols[i].exponents}, static_cast<int>(i));
    return map;
}

SymbolicVerdict verify_plan_symbolic(const BeamPlan& plan) {
    for (std::size_t c = 0; c < plan.constraints.size(); ++c) {
        const auto& con = plan.constraints[c];
        auto targets = column_index(plan, con.m);
        const auto& cols = plan.columns[static_cast<std::size_t>(con.n) - 1];
        for (std::size_t i = 0; i < cols.size(); ++i) {
            std::vector<int> bumped = cols[i].exponents;
            ++bumped[c];
            if (!targets.count({cols[i].base, bumped})) {
                SymbolicVerdict v;
                v.pass = false;
                v.constraint_index = static_cast<int>(c);
                v.transmitter = con.n;
                v.column_index = static_cast<int>(i);
                v.message = "column " + std::to_string(i) + " of transmitter " +
                            std::to_string(con.n) + " has no aligned image at transmitter " +
                            std::to_string(con.m) + " for constraint (" + std::to_string(con.m) +
                            "," + std::to_string(con.n) + "," + std::to_string(con.j) + ")";
                return v;
            }
        }
    }
    return {};
}

std::vector<int> MultiBeamPlan::branch(int q) const {
    std::vector<int> idx;
    for (std::size_t c = 0; c < constraints.size(); ++c)
        if (constraints[c].q == q) idx.push_back(static_cast<int>(c));
    return idx;
}

MultiBeamPlan build_multi_plan(const DemandSpec& spec, const IntegerizedPoint& ip, int l,
                               const std::vector<MultiAlignmentConstraint>& constraints,
                               long long tau_cap) {
    if (spec.M < 2)
        throw std::invalid_argument("multi-antenna plan requires M >= 2; use build_plan for M = 1");
    if (l < 1) throw std::invalid_argument("l must be >= 1");
    MultiBeamPlan plan;
    plan.spec = spec;
    plan.constraints = constraints;
    plan.l = l;
    plan.kappa = ip.kappa;
    plan.dbar = ip.dbar;
    plan.gamma_m = static_cast<int>(constraints.size());
    plan.gamma_m_q = plan.gamma_m / spec.M;
    plan.gamma_m_kq.resize(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) {
        int count = 0;
        for (const auto& c : constraints)
            if (c.q == 1 && c.n <= k) ++count;  // identical for every branch
        plan.gamma_m_kq[static_cast<std::size_t>(k) - 1] = count;
    }
    long long m2 = static_cast<long long>(spec.M) * spec.M;
    plan.tau = checked_mul(checked_mul(ip.kappa, m2, tau_cap, "tau"),
                           checked_pow(l + 1, plan.gamma_m_q, tau_cap, "tau"), tau_cap, "tau");

    plan.columns.resize(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) {
        auto& cols = plan.columns[static_cast<std::size_t>(k) - 1];
        for (long long base = 1; base <= ip.dbar[static_cast<std::size_t>(k) - 1]; ++base) {
            for (int q = 1; q <= spec.M; ++q) {
                auto idx = plan.branch(q);
                std::vector<int> lo(idx.size()), hi(idx.size());
                for (std::size_t c = 0; c < idx.size(); ++c) {
                    const auto& con = constraints[static_cast<std::size_t>(idx[c])];
                    lo[c] = (q - 1) * (l + 1);
                    hi[c] = con.n > k ? q * (l + 1) - 1 : q * (l + 1) - 2;
                }
                std::vector<int> alpha = lo;
                for (;;) {
                    cols.push_back({static_cast<int>(base), q, alpha});
                    std::size_t pos = idx.size();
                    while (pos > 0 && alpha[pos - 1] == hi[pos - 1]) {
                        alpha[pos - 1] = lo[pos - 1];
                        --pos;
                    }
                    if (pos == 0) break;
                    ++alpha[pos - 1];
                }
            }
        }
    }
    return plan;
}

std::map<MultiColumnKey, int> column_index(const MultiBeamPlan& plan, int k) {
    std::map<MultiColumnKey, int> map;
    const auto& cols = plan.columns[static_cast<std::size_t>(k) - 1];
    for (std::size_t i = 0; i < cols.size(); ++i)
        map.emplace(MultiColumnKey{cols[i].q, cols[i].base, cols[i].exponents},
                    static_cast<int>(i));
    return map;
}

SymbolicVerdict verify_multi_plan_symbolic(const MultiBeamPlan& plan) {
    for (std::size_t c = 0; c < plan.constraints.size(); ++c) {
        const auto& con = plan.constraints[c];
        auto idx = plan.branch(con.q);
        auto within = std::find(idx.begin(), idx.end(), static_cast<int>(c)) - idx.begin();
        auto targets = column_index(plan, con.m);
        const auto& cols = plan.columns[static_cast<std::size_t>(con.n) - 1];
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i].q != con.q) continue;
            std::vector<int> bumped = cols[i].exponents;
            ++bumped[static_cast<std::size_t>(within)];
            if (!targets.count({con.q, cols[i].base, bumped})) {
                SymbolicVerdict v;
                v.pass = false;
                v.constraint_index = static_cast<int>(c);
                v.transmitter = con.n;
                v.column_index = static_cast<int>(i);
                v.message = "branch " + std::to_string(con.q) + " column " + std::to_string(i) +
                            " of transmitter " + std::to_string(con.n) +
                            " has no aligned image at transmitter " + std::to_string(con.m);
                return v;
            }
        }
    }
    return {};
}

Rational dof_fraction(const BeamPlan& plan, int k) {
    return Rational(plan.column_count(k), plan.tau);
}

Rational dof_fraction(const MultiBeamPlan& plan, int k) {
    return Rational(plan.column_count(k) * plan.spec.M, plan.tau);
}

} // namespace dofalign
