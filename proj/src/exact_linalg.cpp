#include "dofalign/exact_linalg.hpp"

namespace dofalign {

std::optional<std::vector<Rational>> solve_exact(RationalMatrix a, std::vector<Rational> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            Rational f = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

int rank_exact(RationalMatrix a) {
    if (a.empty()) return 0;
    const std::size_t rows = a.size();
    const std::size_t cols = a[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[row]);
        for (std::size_t r = row + 1; r < rows; ++r) {
            if (a[r][col] == 0) continue;
            Rational f = a[r][col] / a[row][col];
            for (std::size_t k = col; k < cols; ++k) a[r][k] -= f * a[row][k];
        }
        ++row;
        ++rank;
    }
    return rank;
}

} // namespace dofalign
