#include "fdc/linalg.hpp"

#include <algorithm>

namespace fdc {

double frobenius_norm(const Mat& m) {
    double s = 0;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

double operator_norm(const Mat& j) {
    const std::size_t n = j.cols;
    if (n == 0 || j.rows == 0) return 0.0;

    using Sq = std::array<double, Mat::cap * Mat::cap>;
    auto at = [](Sq& m, std::size_t p, std::size_t q) -> double& { return m[p * Mat::cap + q]; };

    // G = J^T J, n x n with n <= 8, positive semidefinite.
    Sq g{};
    double diag_max = 0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            double s = 0;
            for (std::size_t i = 0; i < j.rows; ++i) s += j(i, p) * j(i, q);
            at(g, p, q) = s;
            if (p == q) diag_max = std::max(diag_max, s);
        }
    if (diag_max == 0.0) return 0.0;

    // Power iteration accelerated by repeated squaring: after k squarings
    // the eigenvalue ratio is raised to 2^k, so even a spectral gap near
    // machine epsilon collapses and the iterate below lands in the top
    // eigenspace.  For a PSD matrix the largest entry sits on the
    // diagonal, which makes it a safe renormalizer.
    Sq p = g;
    for (std::size_t q = 0; q < n * Mat::cap; ++q) p[q] /= diag_max;
    for (int step = 0; step < 60; ++step) {
        Sq next{};
        double dm = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                double s = 0;
                for (std::size_t c = 0; c < n; ++c) s += at(p, a, c) * at(p, c, b);
                at(next, a, b) = s;
                if (a == b) dm = std::max(dm, s);
            }
        if (dm == 0.0 || !std::isfinite(dm)) break;
        for (std::size_t q = 0; q < n * Mat::cap; ++q) next[q] /= dm;
        p = next;
    }

    // Project a start vector with mass on every coordinate; fall back to
    // basis vectors if it happens to be orthogonal to the top eigenspace.
    std::array<double, Mat::cap> v{};
    double nv = 0;
    for (std::size_t tries = 0; tries <= n && nv == 0.0; ++tries) {
        std::array<double, Mat::cap> x{};
        if (tries == 0)
            for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.013 * static_cast<double>(i);
        else
            x[tries - 1] = 1.0;
        nv = 0;
        for (std::size_t a = 0; a < n; ++a) {
            double s = 0;
            for (std::size_t b = 0; b < n; ++b) s += at(p, a, b) * x[b];
            v[a] = s;
            nv += s * s;
        }
        nv = std::sqrt(nv);
    }
    if (nv == 0.0) return 0.0;
    for (std::size_t a = 0; a < n; ++a) v[a] /= nv;

    // Rayleigh quotient in the original matrix.
    double lambda = 0;
    for (std::size_t a = 0; a < n; ++a) {
        double s = 0;
        for (std::size_t b = 0; b < n; ++b) s += at(g, a, b) * v[b];
        lambda += v[a] * s;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

static double det2(double a, double b, double c, double d) { return a * d - b * c; }

double rows_det(const Mat& j, const std::size_t* r, std::size_t n) {
    switch (n) {
        case 1:
            return j(r[0], 0);
        case 2:
            return det2(j(r[0], 0), j(r[0], 1), j(r[1], 0), j(r[1], 1));
        case 3: {
            double m00 = j(r[0], 0), m01 = j(r[0], 1), m02 = j(r[0], 2);
            double m10 = j(r[1], 0), m11 = j(r[1], 1), m12 = j(r[1], 2);
            double m20 = j(r[2], 0), m21 = j(r[2], 1), m22 = j(r[2], 2);
            return m00 * det2(m11, m12, m21, m22) - m01 * det2(m10, m12, m20, m22) +
                   m02 * det2(m10, m11, m20, m21);
        }
        case 4: {
            double d = 0;
            double sign = 1.0;
            for (std::size_t c = 0; c < 4; ++c) {
                std::size_t rc[3] = {r[1], r[2], r[3]};
                // 3x3 minor skipping column c of the top row.
                double m[3][3];
                for (std::size_t i = 0; i < 3; ++i) {
                    std::size_t cc = 0;
                    for (std::size_t q = 0; q < 4; ++q) {
                        if (q == c) continue;
                        m[i][cc++] = j(rc[i], q);
                    }
                }
                double minor = m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
                               m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
                               m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
                d += sign * j(r[0], c) * minor;
                sign = -sign;
            }
            return d;
        }
        default:
            return 0.0;
    }
}

}  // namespace fdc
