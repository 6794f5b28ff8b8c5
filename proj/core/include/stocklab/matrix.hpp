#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stocklab {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    const double* row(std::size_t r) const { return values.data() + r * cols; }
    double* row(std::size_t r) { return values.data() + r * cols; }

    bool empty() const { return rows == 0 || cols == 0; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows);
        for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
        return out;
    }

    /// Rows selected by index, in the given order.
    Matrix select_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= rows) throw std::out_of_range("matrix row index out of range");
            for (std::size_t c = 0; c < cols; ++c) out.at(i, c) = at(idx[i], c);
        }
        return out;
    }
};

}  // namespace stocklab
