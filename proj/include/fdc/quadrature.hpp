#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fdc/smallvec.hpp"

namespace fdc {

using ScalarField = std::function<double(const Vec&)>;

// Depth of the log-polar substitution: radii below e^{-depth} of the chart
// scale are left to the caller (their mass is below e^{-2 depth} of the
// chart scale squared, so callers that want them must splice in their own
// tail on the log-radius scale).
constexpr double kLogPolarDepth = 200.0;

// Realized depth of a log-polar chart about the given center at the given
// scale: the nominal kLogPolarDepth, capped for off-origin centers where
// deeper sample radii would round onto the center itself. Tail splices
// must start here, not at the nominal depth.
double log_polar_reach(const Vec& center, double scale);

enum class RegionKind { Rectangle, Ball, Annulus };

struct Region {
    RegionKind kind = RegionKind::Rectangle;
    Vec lo, hi;      // rectangle corners
    Vec center;      // ball / annulus
    double r_inner = 0, r_outer = 1;

    std::size_t dim() const;

    static Region rectangle(const Vec& lo, const Vec& hi);
    static Region ball(const Vec& center, double radius);
    static Region annulus(const Vec& center, double r_inner, double r_outer);
};

struct QuadratureTask {
    Region region;
    std::vector<Vec> singular_points;  // points outside the region are ignored
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    std::size_t max_subdivisions = 200000;  // total cell budget
    // Substitute t = log(1/r) around the singular point (ball center,
    // annulus center, or the one interior singular point of a rectangle).
    bool log_polar = false;

    void validate() const;
};

struct IntegralResult {
    double value = 0;
    double error_estimate = 0;
    bool inconclusive = false;  // cell budget ran out before tolerances were met
    std::size_t cells = 0;
};

// Adaptive tensor Gauss-Kronrod 7-15 over mapped patches.  The region is
// cut into a fixed initial tiling (independent of thread count), tiles are
// refined independently (OpenMP across tiles), and tile results combine by
// pairwise summation in tile order, so the result is bitwise identical for
// any thread count.
IntegralResult integrate(const ScalarField& g, const QuadratureTask& task);

// Same refinement, plain left-to-right accumulation, no OpenMP.  Kept as
// the reference the parallel path is tested against.
IntegralResult integrate_serial(const ScalarField& g, const QuadratureTask& task);

// Deterministic pairwise reduction, the accumulation policy used above.
double pairwise_sum(const std::vector<double>& xs);

}  // namespace fdc
