#pragma once

#include <cstddef>
#include <vector>

#include "fdc/scales.hpp"

namespace fdc {

// Radial cut-off profile with prescribed gradient growth.  The profile u
// climbs by exactly 1 over each shell a_{k+1} <= |x| <= a_k, the shells
// shrink super-fast (a_3 is already below e^{-e^{890}}), and the gradient
// h_k is pinned by the gauge equation gauge(2 h_k(t)) = (2^k t)^n.
//
// Everything below the second shell lives on the nested log scales of
// TierRadius; raw doubles physically cannot leave shell 2.

// gauge(t) = t^-n log^-n(e+t) log^-n(log(e+t)); decreasing, positive.
double bump_rate_gauge(std::size_t n, double t);

// energy gauge(t) = t^n log^{n-1}(e+t) log^{n-1}(log(e+t)); the density
// whose shell integrals the construction keeps summable.
double bump_energy_gauge(std::size_t n, double t);

// The gradient on shell k at radius t = e^-tau, n = 2.  Solves the gauge
// equation to relative 1e-12.  Values are clamped below at 1e-300 and
// *underflow is set when the clamp fires; with double inputs the true
// value decays only like t^{-1/2} so the clamp is dormant, but the guard
// keeps the contract explicit.
double h_rate(std::size_t k, double t, bool* underflow = nullptr);

// log(2 h_k) at t = e^-tau; usable wherever tau itself is representable.
double h_rate_log2h(std::size_t k, double tau);

// Climb rate of u per unit varsigma = log log log(1/r) on shell k.
// Equals 2^-(k+1) exactly (in doubles) once varsigma > 4.
double u_rate_per_varsigma(std::size_t k, double vs);

// Energy-gauge mass of the gradient per unit varsigma on shell k; settles
// at 2^-2(k+1) beyond varsigma = 4.
double u_energy_rate_per_varsigma(std::size_t k, double vs);

struct BumpTables {
    std::size_t n = 2;
    std::size_t depth = 12;  // number of shells built
    double quad_tol = 1e-10;

    // a[k] = outer radius of shell k, for k = 1 .. depth+1; a[0] unused.
    // a[1] = 1 and a[2] are raw; deeper entries carry only varsigma.
    std::vector<TierRadius> a;

    // vs_shell[k] = varsigma at a[k] for k = 2 .. depth+1; [0],[1] unused.
    std::vector<double> vs_shell;

    // Shell-2 bookkeeping: beyond vs_cut the climb rate is exactly 1/8,
    // and u_to_cut is the climb from the top of shell 2 to vs_cut.
    double vs_cut = 6.6;
    double u_to_cut = 0;

    double phi(double t) const { return bump_rate_gauge(n, t); }
    double h(std::size_t k, double t) const { return h_rate(k, t); }
};

// Builds the shell radii so each shell carries unit climb.  Only the
// planar profile (n = 2) is constructed; depth >= 2.
BumpTables build_bump_tables(std::size_t n = 2, std::size_t depth = 12,
                             double quad_tol = 1e-10);

// u at raw radius r in (0, 1]; r > 1 is out of domain.
double u_eval(const BumpTables& t, double r);

// u at a tiered radius, valid down to the floor of shell `depth`.
// Radii below that floor raise EvalError naming the deepest shell.
double u_eval_tier(const BumpTables& t, const TierRadius& r);

// Inverse of u_eval_tier on [1, depth+1].
TierRadius radius_of_u(const BumpTables& t, double u);

// Integral of the energy gauge of the gradient over each shell (index
// k-1 for shell k), against area measure.
std::vector<double> shell_energies(const BumpTables& t);

// Dyadic budget the shell energies stay under: 2 pi 2^{k(1-n)}.
double shell_energy_bound(std::size_t n, std::size_t k);

// (1 + tau) sigma / (2^{k+1} L log L) with L = log(e + 2 h_k); equals
// h_k(t) * t (1 - log t) log log(1/t), so values <= 1 certify the
// comparison h_k(t) <= 1 / (t (1 - log t) log log(1/t)).
double gradient_bound_ratio(std::size_t k, double tau);

// Largest radius below 1/e, on a downward log scan, where the comparison
// above already holds for shell k.  Computed, not guessed.
double bump_smallness_radius(std::size_t k = 1);

}  // namespace fdc
