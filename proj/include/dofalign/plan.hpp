#pragma once

#include "dofalign/demand.hpp"
#include "dofalign/rational.hpp"
#include "dofalign/region.hpp"

#include <map>
#include <vector>

namespace dofalign {

// "Align message n onto message m at receiver j", with m the dominant
// interferer delta_j and n a later (smaller-DoF) interferer.
struct AlignmentConstraint {
    int m = 0;
    int n = 0;
    int j = 0;

    friend bool operator==(const AlignmentConstraint&, const AlignmentConstraint&) = default;
};

// Multi-antenna lift: p is the transmit virtual-antenna index of message n,
// q the block index of the diagonal operator extracted from the stacked
// inverse at receiver j.
struct MultiAlignmentConstraint {
    int m = 0;
    int n = 0;
    int j = 0;
    int p = 0;
    int q = 0;

    friend bool operator==(const MultiAlignmentConstraint&,
                           const MultiAlignmentConstraint&) = default;
};

// Exact integerization of a rational DoF point: kappa * d, renumbered so the
// integer DoFs are nonincreasing. perm[k-1] is the new index of original
// message k; dbar is indexed by new (permuted) message index.
struct IntegerizedPoint {
    std::vector<long long> dbar;
    long long kappa = 1;
    std::vector<int> perm;
};

/// kappa is the least common multiple of the reduced denominators (so minimal);
/// ties in the nonincreasing sort are broken by original index.
/// Throws std::invalid_argument on negative components and std::overflow_error
/// when kappa does not fit a 64-bit integer.
IntegerizedPoint integerize(const DofPoint& point);

/// Relabel message indices of a spec through perm (receiver indices are
/// untouched). Plan construction runs in this permuted space.
DemandSpec permute_messages(const DemandSpec& spec, const std::vector<int>& perm);

/// Alignment constraint set in deterministic (j, n) order. Full mode walks
/// every receiver; grouped mode only the prime receivers of the demand poset.
/// Message indices are assumed already renumbered to nonincreasing DoF.
std::vector<AlignmentConstraint> build_constraints(const DemandSpec& spec, bool grouped);

/// Cartesian lift of build_constraints over (p, q) in {1..M}^2, ordered by
/// (j, n, p, q); the lifted set has M^2 times the single-antenna size.
std::vector<MultiAlignmentConstraint> build_multi_constraints(const DemandSpec& spec,
                                                              bool grouped);

// One beamforming column, described symbolically: built from base vector
// w_base by applying each constraint's diagonal operator with the listed
// exponent (dense, in constraint order).
struct PlanColumn {
    int base = 0;
    std::vector<int> exponents;
};

struct BeamPlan {
    DemandSpec spec;  // permuted message space
    std::vector<AlignmentConstraint> constraints;
    int l = 1;
    long long kappa = 1;
    std::vector<long long> dbar;
    int gamma = 0;                          // |C|
    std::vector<int> gamma_k;               // constraints with n <= k, per k
    long long tau = 0;                      // kappa * (l+1)^gamma
    std::vector<std::vector<PlanColumn>> columns;  // per transmitter

    long long column_count(int k) const {
        return static_cast<long long>(columns[static_cast<std::size_t>(k) - 1].size());
    }
};

/// Generate every beamforming column of every transmitter: transmitter k uses
/// base vectors 1..dbar_k and exponent ranges {0..l} for constraints with
/// n > k, {0..l-1} otherwise, so the dominant side of each constraint owns one
/// extra power. Throws CapExceededError when tau (or a column count) exceeds
/// tau_cap.
BeamPlan build_plan(const DemandSpec& spec, const IntegerizedPoint& ip, int l,
                    const std::vector<AlignmentConstraint>& constraints,
                    long long tau_cap = 20000);

struct SymbolicVerdict {
    bool pass = true;
    int constraint_index = -1;  // first failing constraint, when !pass
    int transmitter = 0;        // aligned transmitter n of that constraint
    int column_index = -1;      // offending column of transmitter n
    std::string message;
};

/// Exhaustive containment check: for every constraint (m,n,j) and every column
/// of transmitter n, bumping that constraint's exponent by one must land on an
/// existing column of transmitter m with the same base vector.
SymbolicVerdict verify_plan_symbolic(const BeamPlan& plan);

// Multi-antenna column: exponents run over the branch-q constraint sublist
// only, with window {(q-1)(l+1) .. q(l+1)-1} (top shrunk by one for the
// transmitter's own constraints).
struct MultiPlanColumn {
    int base = 0;
    int q = 0;
    std::vector<int> exponents;
};

struct MultiBeamPlan {
    DemandSpec spec;  // permuted message space
    std::vector<MultiAlignmentConstraint> constraints;  // C^M, (j,n,p,q) order
    int l = 1;
    long long kappa = 1;
    std::vector<long long> dbar;
    int gamma_m = 0;                 // |C^M| = M^2 |C|
    int gamma_m_q = 0;               // per-branch size, |C^M| / M
    std::vector<int> gamma_m_kq;     // per k: branch constraints with n <= k
    long long tau = 0;               // kappa * M^2 * (l+1)^{gamma_m_q}
    std::vector<std::vector<MultiPlanColumn>> columns;  // per transmitter

    long long column_count(int k) const {
        return static_cast<long long>(columns[static_cast<std::size_t>(k) - 1].size());
    }
    /// Constraint indices of branch q, in global order.
    std::vector<int> branch(int q) const;
};

/// Multi-antenna plan over per-branch exponent windows. Requires M >= 2 (the
/// M = 1 lift is the single-antenna plan; use build_plan).
MultiBeamPlan build_multi_plan(const DemandSpec& spec, const IntegerizedPoint& ip, int l,
                               const std::vector<MultiAlignmentConstraint>& constraints,
                               long long tau_cap = 20000);

/// Per-branch analogue of verify_plan_symbolic.
SymbolicVerdict verify_multi_plan_symbolic(const MultiBeamPlan& plan);

/// Exact |V_k| / tau; approaches d_k monotonically as l grows.
Rational dof_fraction(const BeamPlan& plan, int k);

/// Exact per-message fraction M * |V_k| / tau (each of the M virtual antennas
/// of transmitter k carries |V_k| streams).
Rational dof_fraction(const MultiBeamPlan& plan, int k);

// Lookup tables from (base, exponents) to column position, used by both the
// symbolic check and the numeric alignment check.
using ColumnKey = std::pair<int, std::vector<int>>;
std::map<ColumnKey, int> column_index(const BeamPlan& plan, int k);
using MultiColumnKey = std::tuple<int, int, std::vector<int>>;  // (q, base, exponents)
std::map<MultiColumnKey, int> column_index(const MultiBeamPlan& plan, int k);

} // namespace dofalign
