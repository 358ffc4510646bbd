#include "dofalign/simplex.hpp"

#include <stdexcept>

namespace dofalign {

namespace {

// Lexicographic sign of a reduced-cost tuple: >0 means improving.
int lex_sign(const std::vector<Rational>& v) {
    for (const auto& r : v) {
        if (r > 0) return 1;
        if (r < 0) return -1;
    }
    return 0;
}

} // namespace

SimplexResult simplex_lex_maximize(const std::vector<std::vector<Rational>>& a,
                                   const std::vector<Rational>& b,
                                   const std::vector<std::vector<Rational>>& objectives) {
    const std::size_t m = a.size();
    const std::size_t n = m == 0 ? (objectives.empty() ? 0 : objectives[0].size()) : a[0].size();
    const std::size_t total = n + m;  // structural + slack variables

    for (const auto& rhs : b)
        if (rhs < 0) throw std::invalid_argument("simplex requires b >= 0");

    // Tableau rows: constraints with slack identity; rhs in the last column.
    std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(total + 1));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t jc = 0; jc < n; ++jc) tab[i][jc] = a[i][jc];
        tab[i][n + i] = 1;
        tab[i][total] = b[i];
        basis[i] = n + i;
    }

    // Reduced-cost rows, one per objective, kept in sync with the pivots.
    std::vector<std::vector<Rational>> cost(objectives.size(), std::vector<Rational>(total + 1));
    for (std::size_t o = 0; o < objectives.size(); ++o)
        for (std::size_t jc = 0; jc < n; ++jc) cost[o][jc] = objectives[o][jc];

    for (;;) {
        // Entering column: smallest index with lex-positive reduced cost (Bland).
        std::size_t enter = total;
        for (std::size_t jc = 0; jc < total; ++jc) {
            std::vector<Rational> rc(cost.size());
            for (std::size_t o = 0; o < cost.size(); ++o) rc[o] = cost[o][jc];
            if (lex_sign(rc) > 0) {
                enter = jc;
                break;
            }
        }
        if (enter == total) break;  // optimal

        // Ratio test; ties broken by smallest basis variable index (Bland).
        std::size_t leave = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab[i][enter] <= 0) continue;
            Rational ratio = tab[i][total] / tab[i][enter];
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) throw std::runtime_error("simplex: unbounded objective");

        // Pivot.
        Rational piv = tab[leave][enter];
        for (auto& v : tab[leave]) v /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || tab[i][enter] == 0) continue;
            Rational f = tab[i][enter];
            for (std::size_t k = 0; k <= total; ++k) tab[i][k] -= f * tab[leave][k];
        }
        for (auto& crow : cost) {
            if (crow[enter] == 0) continue;
            Rational f = crow[enter];
            for (std::size_t k = 0; k <= total; ++k) crow[k] -= f * tab[leave][k];
        }
        basis[leave] = enter;
    }

    SimplexResult res;
    res.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = tab[i][total];
    res.objective_values.resize(objectives.size());
    for (std::size_t o = 0; o < objectives.size(); ++o) {
        Rational v = 0;
        for (std::size_t jc = 0; jc < n; ++jc) v += objectives[o][jc] * res.x[jc];
        res.objective_values[o] = v;
    }
    return res;
}

} // namespace dofalign
