#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace fdc {

// Nested logarithmic scales for radii far below double range.
//   tau      = log(1/r)
//   sigma    = log(tau)
//   varsigma = log(sigma)
// A TierRadius stores the innermost scale that still fits in a double and
// converts outward on demand; conversions that overflow return inf and
// conversions that underflow return 0, which is the correct limit for the
// quantities built from them.
struct TierRadius {
    enum class Tier { Raw, Tau, Sigma, Varsigma };

    Tier tier = Tier::Raw;
    double v = 1.0;

    static TierRadius raw(double r) { return {Tier::Raw, r}; }
    static TierRadius from_tau(double tau) { return {Tier::Tau, tau}; }
    static TierRadius from_sigma(double sigma) { return {Tier::Sigma, sigma}; }
    static TierRadius from_varsigma(double vs) { return {Tier::Varsigma, vs}; }

    double tau() const {
        switch (tier) {
            case Tier::Raw: return -std::log(v);
            case Tier::Tau: return v;
            case Tier::Sigma: return std::exp(v);
            case Tier::Varsigma: return std::exp(std::exp(v));
        }
        return 0;
    }

    double sigma() const {
        switch (tier) {
            case Tier::Raw: return std::log(-std::log(v));
            case Tier::Tau: return std::log(v);
            case Tier::Sigma: return v;
            case Tier::Varsigma: return std::exp(v);
        }
        return 0;
    }

    double varsigma() const {
        switch (tier) {
            case Tier::Varsigma: return v;
            default: return std::log(sigma());
        }
    }

    double to_raw() const {
        if (tier == Tier::Raw) return v;
        return std::exp(-tau());
    }

    // Radii below 1/e have tau > 1 so all three scales increase as the
    // radius shrinks; ordering compares on the outermost scale, which is
    // finite for every tier.
    bool smaller_than(const TierRadius& o) const { return varsigma() > o.varsigma(); }
};

// log(e + e^y), stable for all y.
inline double log_e_plus_exp(double y) {
    if (y > 30.0) return y + std::log1p(std::exp(1.0 - y));
    return std::log(std::exp(1.0) + std::exp(y));
}

// log(x + y) from log x and log y.
inline double log_add(double la, double lb) {
    if (la == -std::numeric_limits<double>::infinity()) return lb;
    if (lb == -std::numeric_limits<double>::infinity()) return la;
    const double hi = std::max(la, lb), lo = std::min(la, lb);
    return hi + std::log1p(std::exp(lo - hi));
}

inline double logsumexp(const std::vector<double>& ls) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : ls) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double s = 0;
    for (double x : ls) s += std::exp(x - hi);
    return hi + std::log(s);
}

}  // namespace fdc
