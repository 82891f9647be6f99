#include "fdc/bump.hpp"

#include <cmath>
#include <functional>

#include "fdc/errors.hpp"
#include "fdc/quadrature.hpp"

namespace fdc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Past this varsigma the rate and density formulas below are flat to
// double precision: their deviation from the limit is O(sigma/tau) with
// tau = exp(sigma) > 5e23, far under one ulp.
constexpr double kVsFlat = 4.0;

// Residual of the gauge equation in log form.  With y = log(2 h) and
// L = log(e + e^y), the equation gauge(2h) = (2^k t)^n collapses for
// every n to y + log L + log log L = log(1/t) - k log 2.  L > 1 for all
// real y, so the residual is defined and strictly increasing everywhere.
double rate_residual(double y) {
    // For y <= 0 go through L - 1 = log1p(e^{y-1}) exactly; forming L
    // first would round e + e^y to e and send log log L to -inf around
    // y = -35, far above where the solution can sit.
    if (y <= 0.0) {
        const double lL = std::log1p(std::log1p(std::exp(y - 1.0)));
        return y + lL + std::log(lL);
    }
    const double L = log_e_plus_exp(y);
    const double lL = std::log(L);
    return y + lL + std::log(lL);
}

// Solves rate_residual(y) = target.  Bisection handles the curved range;
// for large targets the residual is y plus slowly varying terms, so a
// few fixed-point sweeps reach full precision even where the bracket
// endpoints would collide in doubles.
double solve_rate_exponent(double target) {
    if (target > 50.0) {
        double y = target;
        for (int i = 0; i < 8; ++i) {
            const double L = log_e_plus_exp(y);
            const double lL = std::log(L);
            y = target - lL - std::log(lL);
        }
        return y;
    }
    double lo = target - 10.0;
    double hi = std::max(target + 2.0, 2.0);
    while (rate_residual(lo) > target) lo -= 10.0;
    while (rate_residual(hi) < target) hi += 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (rate_residual(mid) < target ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

void require_shell_index(std::size_t k, const char* where) {
    if (k == 0) throw ContractError(std::string(where) + ": shells are numbered from 1");
}

double integrate_line(const std::function<double(double)>& g, double a, double b,
                      double abs_tol) {
    QuadratureTask task;
    task.region = Region::rectangle(Vec{a}, Vec{b});
    task.rel_tol = 1e-12;
    task.abs_tol = abs_tol;
    const IntegralResult res =
        integrate_serial([&g](const Vec& x) { return g(x[0]); }, task);
    if (res.inconclusive) throw EvalError("bump: a shell integral did not converge");
    return res.value;
}

// log of the shell-k energy density per unit varsigma.  Substituting
// t -> tau -> sigma -> varsigma turns the energy-gauge integral of the
// gradient into an integral of exp of this, and the identity
// 2 log h - 2 tau = -2(k+1) log 2 - 2 log L - 2 log log L keeps the
// expression free of the giant cancelling pair 2 log h vs 2 tau.
double log_energy_density_vs(std::size_t k, double vs) {
    const double flat = -2.0 * double(k + 1) * M_LN2;
    if (vs > kVsFlat) return flat;
    const double sigma = std::exp(vs);
    const double tau = std::exp(sigma);
    const double y = solve_rate_exponent(tau - double(k) * M_LN2);
    const double L = log_e_plus_exp(y);
    const double lL = std::log(L);
    const double M = log_e_plus_exp(y - M_LN2);  // log(e + h)
    const double lM = std::log(M);
    return flat - 2.0 * lL - 2.0 * std::log(lL) + lM + std::log(lM) + sigma + vs;
}

// Climb over shell 2 from its top down to varsigma vs, for vs at or
// below the flat cut.
double shell2_climb_to(const BumpTables& t, double vs) {
    return integrate_line([](double s) { return u_rate_per_varsigma(2, s); },
                          t.vs_shell[2], vs, t.quad_tol);
}

double shell1_height(const BumpTables& t, double r) {
    if (r > 1.0) throw ContractError("u_eval: radius outside the unit ball");
    if (!(r > 0)) throw ContractError("u_eval: radius must be positive");
    if (r == 1.0) return 1.0;
    return 1.0 + integrate_line([](double s) { return h_rate(1, s); }, r, 1.0,
                                t.quad_tol);
}

double deep_height(const BumpTables& t, double vs) {
    if (vs <= t.vs_shell[3]) {
        if (vs <= t.vs_cut) return 2.0 + shell2_climb_to(t, vs);
        return 2.0 + t.u_to_cut + 0.125 * (vs - t.vs_cut);
    }
    for (std::size_t k = 3; k <= t.depth; ++k)
        if (vs <= t.vs_shell[k + 1])
            return double(k) + std::ldexp(vs - t.vs_shell[k], -int(k) - 1);
    throw EvalError("u_eval: radius below shell " + std::to_string(t.depth) +
                    ", the deepest built");
}

}  // namespace

double bump_rate_gauge(std::size_t n, double t) {
    if (!(t > 0)) throw ContractError("bump_rate_gauge: argument must be positive");
    const double p = -double(n);
    const double l = std::log(std::exp(1.0) + t);
    return std::pow(t, p) * std::pow(l, p) * std::pow(std::log(l), p);
}

double bump_energy_gauge(std::size_t n, double t) {
    if (t < 0) throw ContractError("bump_energy_gauge: argument must be nonnegative");
    if (t == 0) return 0.0;
    const double p = double(n) - 1.0;
    const double l = std::log(std::exp(1.0) + t);
    return std::pow(t, double(n)) * std::pow(l, p) * std::pow(std::log(l), p);
}

double h_rate(std::size_t k, double t, bool* underflow) {
    require_shell_index(k, "h_rate");
    if (underflow) *underflow = false;
    if (!(t > 0)) throw ContractError("h_rate: radius must be positive");
    const double y = solve_rate_exponent(-std::log(t) - double(k) * M_LN2);
    const double h = 0.5 * std::exp(y);
    if (h < 1e-300) {
        if (underflow) *underflow = true;
        return 1e-300;
    }
    return h;
}

double h_rate_log2h(std::size_t k, double tau) {
    require_shell_index(k, "h_rate_log2h");
    return solve_rate_exponent(tau - double(k) * M_LN2);
}

double u_rate_per_varsigma(std::size_t k, double vs) {
    require_shell_index(k, "u_rate_per_varsigma");
    const double p = std::ldexp(1.0, -int(k) - 1);
    if (vs > kVsFlat) return p;
    const double sigma = std::exp(vs);
    const double tau = std::exp(sigma);
    const double y = solve_rate_exponent(tau - double(k) * M_LN2);
    const double L = log_e_plus_exp(y);
    return p * (tau / L) * (sigma / std::log(L));
}

double u_energy_rate_per_varsigma(std::size_t k, double vs) {
    require_shell_index(k, "u_energy_rate_per_varsigma");
    return std::exp(log_energy_density_vs(k, vs));
}

BumpTables build_bump_tables(std::size_t n, std::size_t depth, double quad_tol) {
    if (n != 2)
        throw ContractError("build_bump_tables: only the planar profile (n = 2) is built");
    if (depth < 2) throw ContractError("build_bump_tables: need at least two shells");
    if (!(quad_tol > 0)) throw ContractError("build_bump_tables: quad_tol must be positive");

    BumpTables t;
    t.n = n;
    t.depth = depth;
    t.quad_tol = quad_tol;
    t.a.assign(depth + 2, TierRadius::raw(1.0));
    t.vs_shell.assign(depth + 2, 0.0);

    // Shell 1 carries unit climb; bisect its floor in radius space.
    const auto climb1 = [quad_tol](double lo_r) {
        return integrate_line([](double s) { return h_rate(1, s); }, lo_r, 1.0,
                              quad_tol);
    };
    double lo = 1e-3, hi = 0.5;
    while (climb1(lo) < 1.0) lo *= 0.5;
    while (climb1(hi) > 1.0) hi = 0.5 * (hi + 1.0);
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (climb1(mid) > 1.0 ? lo : hi) = mid;
    }
    const double a2 = 0.5 * (lo + hi);
    t.a[1] = TierRadius::raw(1.0);
    t.a[2] = TierRadius::raw(a2);
    t.vs_shell[2] = TierRadius::raw(a2).varsigma();

    // Shell 2: integrate the climb rate up to the flat cut, then extend
    // linearly at slope 1/8 until the climb reaches 1.
    t.u_to_cut = integrate_line([](double s) { return u_rate_per_varsigma(2, s); },
                                t.vs_shell[2], t.vs_cut, quad_tol);
    t.vs_shell[3] = t.vs_cut + 8.0 * (1.0 - t.u_to_cut);
    t.a[3] = TierRadius::from_varsigma(t.vs_shell[3]);

    // Deeper shells sit entirely in the flat regime, so unit climb makes
    // each exactly 2^{k+1} wide in varsigma.
    for (std::size_t k = 4; k <= depth + 1; ++k) {
        t.vs_shell[k] = t.vs_shell[3] + (std::ldexp(1.0, int(k) + 1) - 16.0);
        t.a[k] = TierRadius::from_varsigma(t.vs_shell[k]);
    }
    return t;
}

double u_eval(const BumpTables& t, double r) {
    return u_eval_tier(t, TierRadius::raw(r));
}

double u_eval_tier(const BumpTables& t, const TierRadius& r) {
    const double tau2 = t.a[2].tau();
    switch (r.tier) {
        case TierRadius::Tier::Raw:
            if (!(r.v > 0)) throw ContractError("u_eval: radius must be positive");
            if (r.v >= t.a[2].v) return shell1_height(t, r.v);
            return deep_height(t, r.varsigma());
        case TierRadius::Tier::Tau:
            if (r.v <= tau2) return shell1_height(t, std::exp(-r.v));
            return deep_height(t, std::log(std::log(r.v)));
        case TierRadius::Tier::Sigma:
            if (r.v <= t.a[2].sigma()) return shell1_height(t, std::exp(-std::exp(r.v)));
            return deep_height(t, std::log(r.v));
        case TierRadius::Tier::Varsigma:
            if (r.v <= t.vs_shell[2])
                return shell1_height(t, std::exp(-std::exp(std::exp(r.v))));
            return deep_height(t, r.v);
    }
    throw ContractError("u_eval: unrecognized radius tier");
}

TierRadius radius_of_u(const BumpTables& t, double u) {
    if (!(u >= 1.0)) throw ContractError("radius_of_u: the profile starts at height 1");
    if (u > double(t.depth + 1))
        throw EvalError("radius_of_u: height beyond shell " + std::to_string(t.depth) +
                        ", the deepest built");
    if (u == 1.0) return TierRadius::raw(1.0);
    if (u <= 2.0) {
        // Height falls as the radius grows; keep height(lo) >= u >= height(hi).
        double lo = t.a[2].v, hi = 1.0;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (shell1_height(t, mid) >= u ? lo : hi) = mid;
        }
        return TierRadius::raw(0.5 * (lo + hi));
    }
    const double u_cut = 2.0 + t.u_to_cut;
    if (u <= u_cut) {
        double lo = t.vs_shell[2], hi = t.vs_cut;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (2.0 + shell2_climb_to(t, mid) < u ? lo : hi) = mid;
        }
        return TierRadius::from_varsigma(0.5 * (lo + hi));
    }
    if (u <= 3.0) return TierRadius::from_varsigma(t.vs_cut + 8.0 * (u - u_cut));
    const std::size_t k = std::size_t(std::ceil(u)) - 1;
    return TierRadius::from_varsigma(t.vs_shell[k] +
                                     std::ldexp(u - double(k), int(k) + 1));
}

std::vector<double> shell_energies(const BumpTables& t) {
    std::vector<double> e(t.depth, 0.0);
    const std::size_t n = t.n;
    e[0] = kTwoPi * integrate_line(
                        [n](double r) { return bump_energy_gauge(n, h_rate(1, r)) * r; },
                        t.a[2].v, 1.0, t.quad_tol);
    if (t.depth >= 2)
        e[1] = kTwoPi * integrate_line(
                            [](double s) { return std::exp(log_energy_density_vs(2, s)); },
                            t.vs_shell[2], t.vs_shell[3], t.quad_tol);
    // Deeper shells: flat density 2^{-2(k+1)} over a 2^{k+1}-wide shell.
    for (std::size_t k = 3; k <= t.depth; ++k)
        e[k - 1] = kTwoPi * std::ldexp(t.vs_shell[k + 1] - t.vs_shell[k],
                                       -2 * (int(k) + 1));
    return e;
}

double shell_energy_bound(std::size_t n, std::size_t k) {
    require_shell_index(k, "shell_energy_bound");
    return kTwoPi * std::pow(2.0, double(k) * (1.0 - double(n)));
}

double gradient_bound_ratio(std::size_t k, double tau) {
    require_shell_index(k, "gradient_bound_ratio");
    if (!(tau >= 1.0))
        throw ContractError("gradient_bound_ratio: defined for radii at or below 1/e");
    const double y = solve_rate_exponent(tau - double(k) * M_LN2);
    const double L = log_e_plus_exp(y);
    return (1.0 + tau) * std::log(tau) /
           (std::ldexp(1.0, int(k) + 1) * L * std::log(L));
}

double bump_smallness_radius(std::size_t k) {
    require_shell_index(k, "bump_smallness_radius");
    // Scan downward from 1/e.  The onset test holds the ratio to a quarter
    // of the certified constant; just below 1/e the ratio is still near
    // zero, so the first scan point qualifies and the onset sits there.
    for (std::size_t j = 1; j <= 2000000; ++j) {
        const double tau = 1.0 + 1e-3 * double(j);
        if (gradient_bound_ratio(k, tau) <= 0.25) return std::exp(-tau);
    }
    throw EvalError("bump_smallness_radius: no onset found in the scan range");
}

}  // namespace fdc
