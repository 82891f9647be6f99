#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "fdc/smallvec.hpp"

namespace fdc {

// Dense rows x cols matrix, both <= 8. Row-major storage. Used for
// Jacobians (rows = ambient dim m, cols = domain dim n).
struct Mat {
    static constexpr std::size_t cap = 8;
    std::array<double, cap * cap> a{};
    std::size_t rows = 0, cols = 0;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cap + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cap + j]; }

    static Mat identity(std::size_t d) {
        Mat m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec apply(const Vec& x) const {
        Vec y = Vec::zeros(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }
};

double frobenius_norm(const Mat& m);

// Largest singular value via power iteration on J^T J, accelerated by
// repeated matrix squaring so clustered singular values cannot stall the
// Rayleigh quotient below 1e-10 relative accuracy; zero matrix gives 0.
double operator_norm(const Mat& j);

// Determinant of the square submatrix formed by the given rows (all cols).
// Row indices are 0-based here; n <= 4 with direct cofactor expansion.
double rows_det(const Mat& j, const std::size_t* row_idx, std::size_t n);

}  // namespace fdc
