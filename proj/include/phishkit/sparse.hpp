#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace phishkit {

// Sparse row vector: strictly increasing indices, parallel nonzero values.
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    std::size_t nnz() const { return indices.size(); }
    bool empty() const { return indices.empty(); }

    // Value at column j, 0.0 when absent. Binary search over indices.
    double at(std::uint32_t j) const {
        std::size_t lo = 0, hi = indices.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (indices[mid] < j) lo = mid + 1;
            else hi = mid;
        }
        return (lo < indices.size() && indices[lo] == j) ? values[lo] : 0.0;
    }

    double norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }
};

} // namespace phishkit
