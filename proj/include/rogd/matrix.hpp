#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "rogd/kernels.hpp"

namespace rogd {

// Dense row-major matrix, just big enough for the R x R stochastic-matrix
// pipeline. Heavy operations route through rogd::kernels.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }
    double* row(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }

    Matrix mul(const Matrix& other) const {
        assert(cols == other.rows && rows == cols && other.rows == other.cols);
        Matrix out(rows, other.cols);
        kernels::matmul(a.data(), other.a.data(), out.a.data(), rows);
        return out;
    }

    std::vector<double> mulvec(const std::vector<double>& x) const {
        assert(static_cast<int>(x.size()) == cols);
        std::vector<double> out(static_cast<std::size_t>(rows));
        kernels::matvec(a.data(), x.data(), out.data(), rows, cols);
        return out;
    }

    // max over columns of (column max - column min).
    double column_spread() const { return kernels::col_spread(a.data(), rows, cols); }

    // max over rows of |row sum - 1|.
    double row_stochasticity_error() const {
        double worst = 0.0;
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += at(i, j);
            const double e = s > 1.0 ? s - 1.0 : 1.0 - s;
            worst = e > worst ? e : worst;
        }
        return worst;
    }

    double min_entry() const {
        double m = a.empty() ? 0.0 : a[0];
        for (double v : a) m = v < m ? v : m;
        return m;
    }
};

}  // namespace rogd
