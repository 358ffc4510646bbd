#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dofalign {

// Network instance: K single-message transmitters, J receivers, M antennas
// everywhere. demands[j-1] is the set of message indices receiver j wants,
// stored sorted and deduplicated with 1-based values.
struct DemandSpec {
    int K = 0;
    int J = 0;
    int M = 1;
    std::vector<std::vector<int>> demands;

    const std::vector<int>& demand(int j) const { return demands[static_cast<std::size_t>(j) - 1]; }
};

/// Validate and normalize a spec built in code. Throws SpecError.
DemandSpec make_spec(int K, int M, std::vector<std::vector<int>> demands);

/// Parse the JSON demand-spec document {"K": int, "M": int, "demands": [[int,...],...]}.
/// J is implied by the demand list length. Throws SpecError on malformed
/// documents, empty demand sets, out-of-range indices, or nonpositive K/J/M.
DemandSpec parse_spec(const std::string& text);

// Per-receiver derived data: complement of the demand set and the dominant
// interferer delta (smallest complement index; absent when the receiver
// demands everything).
struct ReceiverMeta {
    int receiver = 0;
    std::vector<int> complement;
    std::optional<int> delta;
    int demand_size = 0;
};

std::vector<ReceiverMeta> receiver_meta(const DemandSpec& spec);

// Poset grouping of receivers by demand-set inclusion. maximal_sets holds the
// distinct maximal demand sets in lexicographic order; assignment[j-1] is the
// group of receiver j; primes[g] is the prime receiver of group g (the lowest
// receiver index whose demand set equals the maximal set).
struct Grouping {
    int group_count = 0;
    std::vector<std::vector<int>> maximal_sets;
    std::vector<int> assignment;
    std::vector<int> primes;
};

/// Deterministic tie rule: a non-maximal receiver joins the group of the
/// lexicographically smallest maximal superset.
Grouping compute_grouping(const DemandSpec& spec);

} // namespace dofalign
