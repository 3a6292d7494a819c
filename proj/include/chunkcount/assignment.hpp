#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace chunkcount {

// Row-major tracks x detections cost matrix. Entries strictly greater than
// `forbid_threshold` are pairings the solver must never return.
class CostMatrix {
public:
    CostMatrix(std::size_t rows, std::size_t cols,
               double forbid_threshold = std::numeric_limits<double>::infinity());
    CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
               double forbid_threshold = std::numeric_limits<double>::infinity());

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double forbid_threshold() const noexcept { return forbid_threshold_; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    bool allowed(std::size_t r, std::size_t c) const { return (*this)(r, c) <= forbid_threshold_; }

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
    double forbid_threshold_;
};

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted by row
    std::vector<std::size_t> unmatched_rows;
    std::vector<std::size_t> unmatched_cols;
    double total_cost = 0.0;  // summed over pairs in row order
};

// Minimum-cost matching among the maximum-cardinality matchings of allowed
// pairs (Kuhn-Munkres on a square matrix padded with a forbidden sentinel).
// Throws ValidationError on a non-finite or negative entry.
Assignment solve_assignment(const CostMatrix& m);

}  // namespace chunkcount
