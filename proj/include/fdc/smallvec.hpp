#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace fdc {

// Fixed-capacity vector for points in R^n, n <= 8. The active dimension is
// carried at runtime so forms, maps and quadrature can share one point type.
struct Vec {
    static constexpr std::size_t cap = 8;
    std::array<double, cap> v{};
    std::size_t n = 0;

    Vec() = default;
    Vec(std::initializer_list<double> xs) {
        for (double x : xs) v[n++] = x;
    }
    static Vec zeros(std::size_t dim) {
        Vec r;
        r.n = dim;
        return r;
    }

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t dim() const { return n; }

    Vec& operator+=(const Vec& o) {
        for (std::size_t i = 0; i < n; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (std::size_t i = 0; i < n; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec& operator*=(double c) {
        for (std::size_t i = 0; i < n; ++i) v[i] *= c;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double c, Vec a) { return a *= c; }

    double norm2() const {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.n; ++i) s += a.v[i] * b.v[i];
    return s;
}

}  // namespace fdc
