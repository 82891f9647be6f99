#include "fdc/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdc/errors.hpp"
#include "fdc/scales.hpp"

namespace fdc {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2 * kPi;

// Pointwise distortion built the same way as distortion_at, with the comass
// of a constant form hoisted out of the integration loop.
struct KSampler {
    const MapInstance* f;
    const VolumeForm* w;
    double cm_const = -1;  // comass of a constant form; < 0 means per-point

    double comass_at(const Vec& y) const {
        if (cm_const >= 0) return cm_const;
        return comass(*w, y).value;
    }

    double opnorm(const Vec& x, const Mat& j) const {
        if (f->closed_form_operator_norm) return f->closed_form_operator_norm(x);
        return operator_norm(j);
    }

    // K floored at 1; +inf where the pullback degenerates under a live
    // differential, matching the sampling conventions of the maps module.
    double K(const Vec& x) const {
        const Mat j = f->jac(x);
        const double on = opnorm(x, j);
        if (on == 0) return 1.0;
        const Vec y = f->eval(x);
        const double star = star_pullback(j, *w, y);
        if (star <= 0) return std::numeric_limits<double>::infinity();
        const double num = comass_at(y) * std::pow(on, static_cast<double>(f->domain_dim));
        return std::max(1.0, num / star);
    }

    // K star = max(star, ||w|| |Df|^n): the distortion-weighted density
    // without the division, safe where star vanishes.
    double K_star(const Vec& x) const {
        const Mat j = f->jac(x);
        const double on = opnorm(x, j);
        const Vec y = f->eval(x);
        const double star = star_pullback(j, *w, y);
        const double num = comass_at(y) * std::pow(on, static_cast<double>(f->domain_dim));
        return std::max(star, num);
    }

    double star(const Vec& x) const { return star_pullback(f->jac(x), *w, f->eval(x)); }
};

KSampler make_sampler(const MapInstance& f, const VolumeForm& w) {
    KSampler s{&f, &w, -1};
    if (w.all_constant()) s.cm_const = comass(w, Vec::zeros(w.ambient_dim)).value;
    return s;
}

// Chart geometry of a singular point interior to the region: whether there
// is one, where it sits, and the scale whose log fixes where the log-polar
// chart truncates.
struct SingularCore {
    bool inside = false;
    double scale = 1;
    Vec center = Vec::zeros(2);
};

SingularCore find_core(const Region& reg, const std::vector<Vec>& singulars) {
    SingularCore core;
    for (const auto& s : singulars) {
        switch (reg.kind) {
            case RegionKind::Rectangle: {
                bool in = true;
                double d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < reg.lo.dim(); ++i) {
                    if (s[i] <= reg.lo[i] || s[i] >= reg.hi[i]) in = false;
                    d = std::min(d, std::min(s[i] - reg.lo[i], reg.hi[i] - s[i]));
                }
                if (in) core = {true, d};
                break;
            }
            case RegionKind::Ball: {
                double d2 = 0;
                for (std::size_t i = 0; i < 2; ++i) {
                    const double di = s[i] - reg.center[i];
                    d2 += di * di;
                }
                if (d2 < 1e-24) core = {true, reg.r_outer};
                break;
            }
            case RegionKind::Annulus:
                break;  // the body excludes the center; no core to splice
        }
        if (core.inside) break;
    }
    return core;
}

ShellVerdict profile_verdict(const std::function<double(double)>& log_integrand) {
    return shell_decay_profile(log_integrand).verdict;
}

}  // namespace

ExpIntegralResult exp_distortion_integral(const MapInstance& f, const VolumeForm& w,
                                          double lambda, const QuadratureTask& task) {
    if (!(lambda > 0)) throw ContractError("exp integral: lambda must be positive");
    QuadratureTask t = task;
    for (const auto& s : f.singular_points) {
        bool known = false;
        for (const auto& p : t.singular_points) {
            double d2 = 0;
            for (std::size_t i = 0; i < p.dim(); ++i) d2 += (p[i] - s[i]) * (p[i] - s[i]);
            if (d2 < 1e-28) known = true;
        }
        if (!known) t.singular_points.push_back(s);
    }
    const SingularCore core = find_core(t.region, t.singular_points);
    if (core.inside) t.log_polar = true;

    const KSampler ks = make_sampler(f, w);
    const auto integrand = [&ks, lambda](const Vec& x) { return std::exp(lambda * ks.K(x)); };
    const IntegralResult q = integrate(integrand, t);

    ExpIntegralResult res;
    res.value = q.value;
    res.error_estimate = q.error_estimate;
    if (!core.inside) return res;

    if (!f.distortion_of_tau)
        throw ContractError("exp integral: no radial distortion profile for the singular core");
    ShellSettings ss;
    ss.tau_start = kLogPolarDepth - std::log(core.scale);
    const auto prof = shell_decay_profile(
        [&f, lambda](double tau) {
            return lambda * f.distortion_of_tau(tau) - 2 * tau + std::log(kTwoPi);
        },
        ss);
    res.slope = prof.slope;
    if (prof.verdict == ShellVerdict::Inconclusive)
        throw EvalError("exp integral: shell extrapolation inconclusive");
    if (prof.verdict == ShellVerdict::Divergent) {
        res.divergent = true;
        return res;
    }
    // The chart truncates at radius core.scale e^{-depth}; the shells pick
    // up exactly there, so the seam neither overlaps nor gaps beyond mass
    // of order e^{-2 depth}.
    res.value += prof.value;
    return res;
}

ThresholdResult threshold_lambda(const MapInstance& f, double lambda_lo, double lambda_hi,
                                 double tol) {
    if (!f.distortion_of_tau)
        throw ContractError("threshold: map carries no radial distortion profile");
    if (!(0 < lambda_lo && lambda_lo < lambda_hi) || !(tol > 0))
        throw ContractError("threshold: need 0 < lambda_lo < lambda_hi and tol > 0");

    const auto verdict = [&f](double lambda) {
        const ShellVerdict v = profile_verdict([&f, lambda](double tau) {
            return lambda * f.distortion_of_tau(tau) - 2 * tau + std::log(kTwoPi);
        });
        if (v == ShellVerdict::Inconclusive) throw EvalError("threshold: inconclusive shells");
        return v == ShellVerdict::Divergent;
    };

    if (!verdict(lambda_hi)) return {lambda_hi, true};
    if (verdict(lambda_lo)) throw ContractError("threshold: bracket bottom already divergent");

    double lo = lambda_lo, hi = lambda_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (verdict(mid) ? hi : lo) = mid;
    }
    return {0.5 * (lo + hi), false};
}

CriticalExponentResult critical_orlicz_exponent(const std::function<double(double)>& log_density_net,
                                                double a_lo, double a_hi, double tol) {
    if (!log_density_net) throw ContractError("critical exponent: missing density profile");
    if (!(a_lo < a_hi) || !(tol > 0))
        throw ContractError("critical exponent: need a_lo < a_hi and tol > 0");

    const auto verdict = [&log_density_net](double a) {
        const ShellVerdict v = profile_verdict([&log_density_net, a](double tau) {
            // log g is rebuilt as net + 2 tau; adding the linear part only
            // rounds, while subtracting it from a stored log g at huge tau
            // would erase the subdominant terms that decide the verdict.
            const double net = log_density_net(tau);
            return net + a * std::log(log_e_plus_exp(net + 2 * tau)) + std::log(kTwoPi);
        });
        if (v == ShellVerdict::Inconclusive)
            throw EvalError("critical exponent: inconclusive shells");
        return v == ShellVerdict::Divergent;
    };

    if (!verdict(a_hi)) return {a_hi, true};
    if (verdict(a_lo)) throw ContractError("critical exponent: bracket bottom already divergent");

    double lo = a_lo, hi = a_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (verdict(mid) ? hi : lo) = mid;
    }
    return {0.5 * (lo + hi), false};
}

std::vector<HolderRatio> reverse_holder_ratio(const MapInstance& f, const VolumeForm& w,
                                              const std::vector<BallSpec>& balls, double s) {
    if (!(s > 0 && s < 1)) throw ContractError("reverse Hoelder: s must lie in (0,1)");
    const KSampler ks = make_sampler(f, w);

    std::vector<HolderRatio> out;
    out.reserve(balls.size());
    for (const auto& b : balls) {
        const auto near_center = [&](const Vec& p) {
            double d2 = 0;
            for (std::size_t i = 0; i < 2; ++i) {
                const double di = p[i] - b.center[i];
                d2 += di * di;
            }
            return d2 < 1e-24 * b.radius * b.radius;
        };
        bool centered_singular = false;
        for (const auto& p : f.singular_points)
            if (near_center(p)) centered_singular = true;

        QuadratureTask half;
        half.region = Region::ball(b.center, 0.5 * b.radius);
        half.singular_points = f.singular_points;
        half.log_polar = centered_singular;
        QuadratureTask full = half;
        full.region = Region::ball(b.center, b.radius);

        const auto lhs_int =
            integrate([&ks](const Vec& x) { return std::max(0.0, ks.star(x)); }, half);
        const auto rhs_int = integrate(
            [&ks, s](const Vec& x) { return std::pow(std::max(0.0, ks.K_star(x)), s); }, full);

        // The polar chart truncates at radius scale*e^(-depth). A pullback
        // density that decays only polynomially in tau leaves visible mass
        // below that radius, so splice in the shell extrapolation on both
        // sides of the ratio.
        double lhs_tail = 0, rhs_tail = 0;
        if (centered_singular) {
            if (!f.log_pullback_density_of_tau || !f.distortion_of_tau)
                throw ContractError("reverse Hoelder: singular center needs the radial profiles");
            const auto tail = [&](double scale, const std::function<double(double)>& li) {
                ShellSettings ss;
                ss.tau_start = kLogPolarDepth - std::log(scale);
                const auto prof = shell_decay_profile(li, ss);
                if (prof.verdict == ShellVerdict::Divergent)
                    throw EvalError("reverse Hoelder: mass diverges at the singular center");
                if (prof.verdict == ShellVerdict::Inconclusive)
                    throw EvalError("reverse Hoelder: inconclusive shells at the center");
                return prof.value;
            };
            lhs_tail = tail(0.5 * b.radius, [&f](double tau) {
                return f.log_pullback_density_of_tau(tau) + std::log(kTwoPi);
            });
            rhs_tail = tail(b.radius, [&f, s](double tau) {
                return s * (std::log(f.distortion_of_tau(tau)) +
                            f.log_pullback_density_of_tau(tau)) -
                       2 * (1 - s) * tau + std::log(kTwoPi);
            });
        }

        HolderRatio hr;
        const double half_area = kPi * 0.25 * b.radius * b.radius;
        const double full_area = kPi * b.radius * b.radius;
        const double avg = (rhs_int.value + rhs_tail) / full_area;
        hr.lhs = (lhs_int.value + lhs_tail) / half_area;
        hr.rhs = std::pow(avg, 1.0 / s);
        hr.ratio = hr.lhs / hr.rhs;
        // first-order propagation of both quadrature error estimates
        hr.error_estimate =
            lhs_int.error_estimate / half_area +
            (avg > 0 ? std::pow(avg, 1.0 / s - 1.0) / s * rhs_int.error_estimate / full_area : 0);
        out.push_back(hr);
    }
    return out;
}

OscillationReport osc_check(const ScalarField& u, const Vec& center, double radius,
                            std::size_t boundary_samples, std::size_t interior_samples,
                            double tol) {
    if (!(radius > 0) || boundary_samples < 8 || interior_samples < 8 || center.dim() != 2)
        throw ContractError("osc check: need a 2d center, positive radius, 8+ samples each");

    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    for (std::size_t i = 0; i < boundary_samples; ++i) {
        const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(boundary_samples);
        const double v =
            u(Vec{center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)});
        bmin = std::min(bmin, v);
        bmax = std::max(bmax, v);
    }

    // Sunflower layout: radii sqrt-spaced, angles stepped by the golden
    // angle, giving even deterministic coverage that reaches near both the
    // center and the rim.
    constexpr double kGolden = 2.39996322972865332223155550663361385;
    double imin = bmin, imax = bmax;
    for (std::size_t i = 0; i < interior_samples; ++i) {
        const double r =
            radius * std::sqrt((static_cast<double>(i) + 0.5) / static_cast<double>(interior_samples));
        const double th = kGolden * static_cast<double>(i);
        const double v = u(Vec{center[0] + r * std::cos(th), center[1] + r * std::sin(th)});
        imin = std::min(imin, v);
        imax = std::max(imax, v);
    }

    OscillationReport rep;
    rep.osc_boundary = bmax - bmin;
    rep.osc_ball = imax - imin;
    rep.violated = rep.osc_ball > rep.osc_boundary + tol;
    return rep;
}

double orlicz_gauge(std::size_t n, double a, double t) {
    if (!(t >= 0)) throw ContractError("gauge: t must be nonnegative");
    return std::pow(t, static_cast<double>(n)) *
           std::pow(std::log(std::exp(1.0) + t), a);
}

double orlicz_gauge_inverse(std::size_t n, double a, double y) {
    if (!(y >= 0)) throw ContractError("gauge inverse: y must be nonnegative");
    if (y == 0) return 0;
    double hi = std::max(1.0, std::pow(y, 1.0 / static_cast<double>(n)));
    while (orlicz_gauge(n, a, hi) < y) hi *= 2;
    double lo = 0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (orlicz_gauge(n, a, mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double modulus_tail(std::size_t n, double a, double L) {
    if (n < 1) throw ContractError("modulus tail: n must be at least 1");
    if (!(L >= 1)) throw ContractError("modulus tail: L must be at least 1");
    if (!(a > static_cast<double>(n)))
        throw EvalError("modulus tail diverges: requires a > n");

    const double nn = static_cast<double>(n);
    const double Y = orlicz_gauge_inverse(n, a, L);
    const double lY = std::log(std::exp(1.0) + Y);

    // After t = P(y) the integrand splits into n/y log^{-a/n}(e+y) plus
    // a/(e+y) log^{-a/n-1}(e+y); the second integrates exactly, and the
    // first splits again through 1/y = 1/(e+y) + e/(y(e+y)) into an exact
    // piece and a bounded remainder on (0,1].
    const double exact2 = nn * std::pow(lY, -a / nn);
    const double exact1 = nn * nn / (a - nn) * std::pow(lY, 1.0 - a / nn);

    QuadratureTask t1;
    t1.region = Region::rectangle(Vec{0.0}, Vec{1.0});
    t1.rel_tol = 1e-11;
    const auto rem = integrate(
        [Y, a, nn](const Vec& v) {
            const double lyv = std::log(std::exp(1.0) + Y / v[0]);
            return std::pow(lyv, -a / nn) / (std::exp(1.0) * v[0] + Y);
        },
        t1);
    return exact2 + exact1 + nn * std::exp(1.0) * rem.value;
}

double area_integrand(const MapInstance& f, const Vec& x) {
    const Mat j = f.jac(x);
    const std::size_t n = f.domain_dim;
    Mat g(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0;
            for (std::size_t r = 0; r < f.ambient_dim; ++r) acc += j(r, p) * j(r, q);
            g(p, q) = acc;
        }
    std::size_t rows_all[4] = {0, 1, 2, 3};
    return std::sqrt(std::max(0.0, rows_det(g, rows_all, n)));
}

AreaCheck area_check(const MapInstance& f, const Vec& lo, const Vec& hi) {
    if (f.catalog_id != "affine")
        throw ContractError("area check: only injective affine maps are supported");
    if (f.domain_dim != lo.dim() || lo.dim() != hi.dim() || lo.dim() > 3)
        throw ContractError("area check: rectangle dimension mismatch");

    Vec mid = Vec::zeros(lo.dim());
    for (std::size_t i = 0; i < lo.dim(); ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
    const Mat j = f.jac(mid);

    const std::size_t n = f.domain_dim;
    Mat gram(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0;
            for (std::size_t r = 0; r < f.ambient_dim; ++r)
                acc += j(r, p) * (hi[p] - lo[p]) * j(r, q) * (hi[q] - lo[q]);
            gram(p, q) = acc;
        }
    std::size_t rows_all[4] = {0, 1, 2, 3};
    const double det = rows_det(gram, rows_all, n);
    if (!(det > 0)) throw ContractError("area check: map is not injective");

    AreaCheck res;
    res.rhs = std::sqrt(det);
    QuadratureTask t;
    t.region = Region::rectangle(lo, hi);
    const auto q = integrate([&f](const Vec& x) { return area_integrand(f, x); }, t);
    res.lhs = q.value;
    return res;
}

}  // namespace fdc
