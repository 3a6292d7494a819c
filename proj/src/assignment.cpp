#include "chunkcount/assignment.hpp"

#include "chunkcount/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chunkcount {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double forbid_threshold)
    : CostMatrix(rows, cols, std::vector<double>(rows * cols, 0.0), forbid_threshold) {}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       double forbid_threshold)
    : rows_(rows), cols_(cols), values_(std::move(values)), forbid_threshold_(forbid_threshold) {
    if (values_.size() != rows_ * cols_) {
        throw ValidationError("cost", "expected " + std::to_string(rows_ * cols_) + " entries, got " +
                                          std::to_string(values_.size()));
    }
    if (std::isnan(forbid_threshold_)) {
        throw ValidationError("forbid_threshold", "must not be NaN");
    }
}

namespace {

// Square Hungarian with row/column potentials. Returns row -> column.
// Ties resolve to the lowest column index because every scan is in index
// order with strict comparisons.
std::vector<std::size_t> hungarian_square(const std::vector<double>& cost, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based internally; index 0 is the virtual root column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        col_owner[0] = row;
        std::size_t col0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t r0 = col_owner[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t c = 1; c <= n; ++c) {
                if (used[c]) {
                    continue;
                }
                const double reduced = cost[(r0 - 1) * n + (c - 1)] - u[r0] - v[c];
                if (reduced < min_slack[c]) {
                    min_slack[c] = reduced;
                    way[c] = col0;
                }
                if (min_slack[c] < delta) {
                    delta = min_slack[c];
                    col1 = c;
                }
            }
            for (std::size_t c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[col_owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    min_slack[c] -= delta;
                }
            }
            col0 = col1;
        } while (col_owner[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            col_owner[col0] = col_owner[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t c = 1; c <= n; ++c) {
        row_to_col[col_owner[c] - 1] = c - 1;
    }
    return row_to_col;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    double max_allowed = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = m(r, c);
            if (!std::isfinite(x) || x < 0.0) {
                throw ValidationError("cost", "entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                                  ") must be finite and >= 0");
            }
            if (m.allowed(r, c)) {
                max_allowed = std::max(max_allowed, x);
            }
        }
    }

    Assignment out;
    const std::size_t n = std::max(rows, cols);
    if (n > 0) {
        // One sentinel outweighs any difference in allowed totals, so the
        // optimum first maximises the number of allowed pairs.
        const double sentinel = 2.0 * (static_cast<double>(n) * max_allowed + 1.0);
        std::vector<double> square(n * n, sentinel);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (m.allowed(r, c)) {
                    square[r * n + c] = m(r, c);
                }
            }
        }
        const auto row_to_col = hungarian_square(square, n);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t c = row_to_col[r];
            if (c < cols && m.allowed(r, c)) {
                out.pairs.emplace_back(r, c);
                out.total_cost += m(r, c);
            }
        }
    }

    std::vector<char> row_used(rows, 0), col_used(cols, 0);
    for (const auto& [r, c] : out.pairs) {
        row_used[r] = 1;
        col_used[c] = 1;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (!row_used[r]) {
            out.unmatched_rows.push_back(r);
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) {
            out.unmatched_cols.push_back(c);
        }
    }
    return out;
}

}  // namespace chunkcount
