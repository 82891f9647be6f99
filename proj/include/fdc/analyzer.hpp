#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fdc/forms.hpp"
#include "fdc/maps.hpp"
#include "fdc/quadrature.hpp"
#include "fdc/shell_profile.hpp"

namespace fdc {

struct ExpIntegralResult {
    double value = 0;  // quadrature part, plus the shell tail when convergent
    double error_estimate = 0;
    bool divergent = false;
    double slope = 0;  // trailing shell slope backing the verdict
};

// Integral of exp(lambda K_f) over the task's region.  Pointwise K follows
// the distortion sampling conventions of the maps module.  Around a singular
// point interior to the region the log-polar chart is forced on, and the
// mass beyond the chart depth comes from the map's radial distortion profile
// by shell extrapolation, which also decides divergence; a map without such
// a profile is rejected for singular regions.
ExpIntegralResult exp_distortion_integral(const MapInstance& f, const VolumeForm& w,
                                          double lambda, const QuadratureTask& task);

struct ThresholdResult {
    double lambda_star = 0;
    bool no_threshold = false;  // still convergent at the bracket top
};

// Growth-rate threshold of the shell verdict for exp(lambda K) mass near the
// singular point: bisects the verdict over [lambda_lo, lambda_hi].
ThresholdResult threshold_lambda(const MapInstance& f, double lambda_lo, double lambda_hi,
                                 double tol);

struct CriticalExponentResult {
    double a_star = 0;
    bool no_critical = false;  // integrable for every exponent in the bracket
};

// Largest a (within tol) keeping g log^a(e+g) integrable near the origin.
// The profile is passed netted, log(g(r) r^2) at r = e^{-tau}, matching
// MapInstance::log_pullback_density_of_tau; the netted form survives at tau
// far beyond where log g and 2 tau would cancel each other to garbage.
CriticalExponentResult critical_orlicz_exponent(const std::function<double(double)>& log_density_net,
                                                double a_lo, double a_hi, double tol);

struct BallSpec {
    Vec center;
    double radius = 1;
};

struct HolderRatio {
    double lhs = 0;    // average of star f* w over the concentric half ball
    double rhs = 0;    // s-mean of (K star f* w) over the full ball
    double ratio = 0;  // lhs / rhs, the empirical comparison constant
    double error_estimate = 0;
};

// Ratio of the half-ball average of the pulled-back density against the
// s-mean of its distortion-weighted version on the full ball, one entry per
// ball.  Negative pullback samples clamp to zero instead of throwing so the
// integrand stays exception-free under OpenMP.
std::vector<HolderRatio> reverse_holder_ratio(const MapInstance& f, const VolumeForm& w,
                                              const std::vector<BallSpec>& balls,
                                              double s = 2.0 / 3.0);

struct OscillationReport {
    double osc_ball = 0;
    double osc_boundary = 0;
    bool violated = false;  // interior oscillation exceeds boundary oscillation
};

// Sampled oscillation comparison on a closed ball: deterministic sunflower
// points inside, uniform angles on the rim.
OscillationReport osc_check(const ScalarField& u, const Vec& center, double radius,
                            std::size_t boundary_samples = 2048,
                            std::size_t interior_samples = 8192, double tol = 1e-6);

// Gauge P(t) = t^n log^a(e+t) and its inverse (monotone bisection).
double orlicz_gauge(std::size_t n, double a, double t);
double orlicz_gauge_inverse(std::size_t n, double a, double y);

// Tail integral of P^{-1}(t) t^{-(n+1)/n} above L, via the substitution
// t = P(y): two closed-form pieces plus one bounded 1d quadrature.  Finite
// exactly when a > n; a <= n raises an evaluation error.
double modulus_tail(std::size_t n, double a, double L);

// sqrt(det(Df^T Df)) at x, the density whose integral measures the image.
double area_integrand(const MapInstance& f, const Vec& x);

struct AreaCheck {
    double lhs = 0;  // integral of the area integrand over the rectangle
    double rhs = 0;  // exact measure of the affine image via its Gram determinant
};

// Injective affine maps only; anything else is rejected.
AreaCheck area_check(const MapInstance& f, const Vec& lo, const Vec& hi);

}  // namespace fdc
