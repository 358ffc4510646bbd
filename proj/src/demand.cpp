#include "dofalign/demand.hpp"

#include "dofalign/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace dofalign {

DemandSpec make_spec(int K, int M, std::vector<std::vector<int>> demands) {
    if (K < 1) throw SpecError("K must be positive, got " + std::to_string(K));
    if (M < 1) throw SpecError("M must be positive, got " + std::to_string(M));
    if (demands.empty()) throw SpecError("demand list is empty (J must be positive)");
    for (std::size_t j = 0; j < demands.size(); ++j) {
        auto& set = demands[j];
        if (set.empty())
            throw SpecError("demand set of receiver " + std::to_string(j + 1) + " is empty");
        for (int k : set) {
            if (k < 1 || k > K)
                throw SpecError("message index " + std::to_string(k) + " of receiver " +
                                std::to_string(j + 1) + " out of range 1.." + std::to_string(K));
        }
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
    }
    DemandSpec spec;
    spec.K = K;
    spec.J = static_cast<int>(demands.size());
    spec.M = M;
    spec.demands = std::move(demands);
    return spec;
}

DemandSpec parse_spec(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("malformed demand-spec document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("K") || !doc.contains("M") || !doc.contains("demands"))
        throw SpecError("demand-spec document must be an object with fields K, M, demands");
    if (!doc["K"].is_number_integer() || !doc["M"].is_number_integer() || !doc["demands"].is_array())
        throw SpecError("demand-spec fields have wrong types (K: int, M: int, demands: [[int,...],...])");
    std::vector<std::vector<int>> demands;
    for (const auto& entry : doc["demands"]) {
        if (!entry.is_array())
            throw SpecError("each entry of demands must be an array of message indices");
        std::vector<int> set;
        for (const auto& v : entry) {
            if (!v.is_number_integer())
                throw SpecError("message indices must be integers");
            set.push_back(v.get<int>());
        }
        demands.push_back(std::move(set));
    }
    return make_spec(doc["K"].get<int>(), doc["M"].get<int>(), std::move(demands));
}

std::vector<ReceiverMeta> receiver_meta(const DemandSpec& spec) {
    std::vector<ReceiverMeta> out;
    out.reserve(static_cast<std::size_t>(spec.J));
    for (int j = 1; j <= spec.J; ++j) {
        ReceiverMeta meta;
        meta.receiver = j;
        meta.demand_size = static_cast<int>(spec.demand(j).size());
        const auto& wanted = spec.demand(j);
        for (int k = 1; k <= spec.K; ++k) {
            if (!std::binary_search(wanted.begin(), wanted.end(), k))
                meta.complement.push_back(k);
        }
        if (!meta.complement.empty()) meta.delta = meta.complement.front();
        out.push_back(std::move(meta));
    }
    return out;
}

Grouping compute_grouping(const DemandSpec& spec) {
    // Distinct demand sets, then keep the maximal ones under inclusion.
    std::vector<std::vector<int>> distinct = spec.demands;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    auto strictly_contains = [](const std::vector<int>& big, const std::vector<int>& small) {
        return big.size() > small.size() &&
               std::includes(big.begin(), big.end(), small.begin(), small.end());
    };

    Grouping g;
    for (const auto& set : distinct) {
        bool maximal = true;
        for (const auto& other : distinct) {
            if (strictly_contains(other, set)) {
                maximal = false;
                break;
            }
        }
        if (maximal) g.maximal_sets.push_back(set);
    }
    // distinct is lex-sorted, so maximal_sets inherits lexicographic order.
    g.group_count = static_cast<int>(g.maximal_sets.size());

    g.assignment.resize(static_cast<std::size_t>(spec.J), -1);
    for (int j = 1; j <= spec.J; ++j) {
        const auto& set = spec.demand(j);
        for (int gi = 0; gi < g.group_count; ++gi) {
            const auto& top = g.maximal_sets[static_cast<std::size_t>(gi)];
            if (top == set || strictly_contains(top, set)) {
                g.assignment[static_cast<std::size_t>(j) - 1] = gi;
                break;  // smallest lexicographic maximal superset wins
            }
        }
    }

    g.primes.resize(static_cast<std::size_t>(g.group_count), 0);
    for (int gi = 0; gi < g.group_count; ++gi) {
        for (int j = 1; j <= spec.J; ++j) {
            if (spec.demand(j) == g.maximal_sets[static_cast<std::size_t>(gi)]) {
                g.primes[static_cast<std::size_t>(gi)] = j;
                break;
            }
        }
    }
    return g;
}

} // namespace dofalign
