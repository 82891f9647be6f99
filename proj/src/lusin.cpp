#include "fdc/lusin.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fdc/errors.hpp"
#include "fdc/quadrature.hpp"
#include "fdc/shell_profile.hpp"

namespace fdc {

namespace {

// log(1 + tau) at any tier without forming tau itself.
double log1p_tau(const TierRadius& r) {
    switch (r.tier) {
        case TierRadius::Tier::Raw: return std::log1p(-std::log(r.v));
        case TierRadius::Tier::Tau: return std::log1p(r.v);
        case TierRadius::Tier::Sigma: return r.v + std::log1p(std::exp(-r.v));
        case TierRadius::Tier::Varsigma: {
            const double s = std::exp(r.v);
            return s + std::log1p(std::exp(-s));
        }
    }
    return 0;
}

// r / factor across tiers: tau gains log(factor), which the deep scales
// absorb without a trace once tau dwarfs it.  That loss is the correct
// double rounding, not an approximation choice.
TierRadius shrink(const TierRadius& r, double factor) {
    const double lf = std::log(factor);
    switch (r.tier) {
        case TierRadius::Tier::Raw: return TierRadius::raw(r.v / factor);
        case TierRadius::Tier::Tau: return TierRadius::from_tau(r.v + lf);
        case TierRadius::Tier::Sigma:
            return TierRadius::from_sigma(r.v + std::log1p(lf * std::exp(-r.v)));
        case TierRadius::Tier::Varsigma: {
            const double s = std::exp(r.v);
            return TierRadius::from_varsigma(std::log(s + std::log1p(lf * std::exp(-s))));
        }
    }
    return r;
}

double integrate_line(const std::function<double(double)>& g, double a, double b) {
    QuadratureTask task;
    task.region = Region::rectangle(Vec{a}, Vec{b});
    task.rel_tol = 1e-10;
    task.abs_tol = 1e-14;
    const IntegralResult res = integrate([&g](const Vec& x) { return g(x[0]); }, task);
    if (res.inconclusive) throw EvalError("lusin: a stage integral did not converge");
    return res.value;
}

std::size_t shell_of_height(double u) {
    const double k = std::ceil(u) - 1.0;
    return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

void require_ball(const BallHierarchy& h, std::size_t level, std::size_t index,
                  const char* where) {
    if (level >= h.depth || level >= h.levels.size())
        throw ContractError(std::string(where) + ": level beyond the built depth");
    if (index >= h.levels[level].count)
        throw ContractError(std::string(where) + ": ball index out of range");
}

}  // namespace

LusinConstruction build_hierarchy(double lambda, double eps, std::size_t depth,
                                  const BumpTables& bump) {
    if (!(lambda > 0.0) || !(lambda < 2.0))
        throw ContractError("build_hierarchy: lambda must lie in (0, 2)");
    if (!(eps > 0.0) || eps > 1.0)
        throw ContractError("build_hierarchy: eps must lie in (0, 1]");
    if (depth < 1) throw ContractError("build_hierarchy: depth must be at least 1");
    if (bump.n != 2 || bump.vs_shell.size() != bump.depth + 2)
        throw ContractError("build_hierarchy: the gradient profile must be built planar tables");

    LusinConstruction out;
    BallHierarchy& h = out.balls;
    h.lambda = lambda;
    h.eps = eps;
    h.depth = depth;
    h.roots = {-0.75, -0.25, 0.25, 0.75};
    h.levels.reserve(depth);

    const double vs_floor = bump.vs_shell[bump.depth + 1];

    for (std::size_t n = 0; n < depth; ++n) {
        LusinLevel lv;
        lv.count = std::size_t(1) << (2 * (n + 1));
        const double log_cap = (std::log(2.0 - lambda) - std::log(2.0 * M_PI) - lambda -
                                double(n) * std::log(8.0)) /
                               (2.0 - lambda);
        lv.cap = std::exp(log_cap);

        if (n == 0) {
            // Four balls must fit disjointly on the segment before the
            // admissible ceiling even enters.
            const double tau0 = std::max(-log_cap, std::log(8.0));
            if (tau0 > 700.0)
                throw InfeasibleError(
                    "build_hierarchy: the admissible level-0 radius has no double "
                    "representation; lambda sits too close to 2");
            // The packing bound 1/8 is exact; keep the min in raw space so
            // it is not blurred by a log round trip.
            lv.outer = TierRadius::raw(std::min(lv.cap, 0.125));
            const double R = lv.outer.v;
            lv.sqrt_scale = R * (1.0 - std::log(R));
        } else {
            const LusinLevel& up = h.levels.back();
            lv.outer = shrink(up.inner, 8.0);
            if (lv.cap > 0.0 && !lv.outer.smaller_than(TierRadius::raw(lv.cap)))
                throw EvalError("build_hierarchy: nesting missed the admissible ceiling");
            lv.sqrt_scale = up.sqrt_scale *
                            std::exp(log1p_tau(lv.outer) - log1p_tau(up.inner)) / 8.0;
        }

        const double nest_branch = shrink(lv.outer, 2.0).sigma();
        const double eps_branch = 1.0 / (eps * lv.sqrt_scale);
        lv.sigma_mid = std::max(nest_branch, eps_branch);
        lv.mid = TierRadius::from_sigma(lv.sigma_mid);
        lv.span = SquareHierarchy::step(int(n) - 1);

        const bool eps_binding = eps_branch >= nest_branch;
        if (!(lv.mid.varsigma() <= vs_floor)) {
            if (eps_binding)
                throw InfeasibleError(
                    "build_hierarchy: no admissible climb edge; the slack eps is too "
                    "small for the built profile depth");
            throw ContractError(
                "build_hierarchy: profile tables too shallow for the nesting chain");
        }
        lv.u_mid = u_eval_tier(bump, lv.mid);
        lv.u_inner = lv.u_mid + lv.span;
        if (lv.u_inner > double(bump.depth) + 1.0 + 1e-12) {
            if (eps_binding)
                throw InfeasibleError(
                    "build_hierarchy: the climb to the next square center overruns the "
                    "profile floor; the slack eps is too small for the built depth");
            throw ContractError(
                "build_hierarchy: profile tables too shallow for the nesting chain");
        }
        lv.inner = radius_of_u(bump, std::min(lv.u_inner, double(bump.depth) + 1.0));
        if (!lv.inner.smaller_than(lv.mid))
            throw EvalError("build_hierarchy: the frozen core failed to sit inside its climb zone");
        h.levels.push_back(lv);
    }

    SquareHierarchy& sq = out.squares;
    sq.depth = depth;
    sq.centers.resize(depth);
    sq.centers[0] = {Vec{-0.5, 0.5}, Vec{-0.5, -0.5}, Vec{0.5, 0.5}, Vec{0.5, -0.5}};
    static constexpr double qx[4] = {-1.0, -1.0, 1.0, 1.0};
    static constexpr double qy[4] = {1.0, -1.0, 1.0, -1.0};
    for (std::size_t n = 1; n < depth; ++n) {
        const double off = std::ldexp(1.0, -int(n) - 1);
        sq.centers[n].reserve(std::size_t(1) << (2 * (n + 1)));
        for (const Vec& p : sq.centers[n - 1])
            for (std::size_t m = 0; m < 4; ++m)
                sq.centers[n].push_back(Vec{p[0] + qx[m] * off, p[1] + qy[m] * off});
    }

    if (!hierarchy_disjoint(h))
        throw EvalError("build_hierarchy: the separation certificates failed");
    return out;
}

bool hierarchy_disjoint(const BallHierarchy& h) {
    if (h.levels.empty()) return false;
    const double R0 = h.levels[0].outer.to_raw();
    for (std::size_t i = 0; i < h.roots.size(); ++i) {
        if (std::abs(h.roots[i]) + R0 > 1.0) return false;
        for (std::size_t j = i + 1; j < h.roots.size(); ++j)
            if (std::abs(h.roots[i] - h.roots[j]) < 2.0 * R0) return false;
    }
    double min_gap = 2.0, max_off = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        max_off = std::max(max_off, std::abs(BallHierarchy::kChildOffset[i]));
        for (std::size_t j = i + 1; j < 4; ++j)
            min_gap = std::min(min_gap, std::abs(BallHierarchy::kChildOffset[i] -
                                                 BallHierarchy::kChildOffset[j]));
    }
    for (std::size_t n = 1; n < h.levels.size(); ++n) {
        // Children of one parent: centers min_gap apart in units of the
        // parent core radius, each ball an eighth of it wide.
        if (!(min_gap > 0.25)) return false;
        if (!(max_off + 0.125 <= 1.0)) return false;
        // Children of different parents: the whole family sits within the
        // parent core, and consecutive core radii collapse at least
        // quadratically, so a sigma gap of log 2 certifies the families
        // cannot meet.  The absolute floor keeps the first core far below
        // the explicit level-0 gaps.
        const double s_prev = n >= 2 ? h.levels[n - 2].inner.sigma() : 0.0;
        const double s_here = h.levels[n - 1].inner.sigma();
        if (!(s_here >= 5.0)) return false;
        if (n >= 2 && !(s_here >= s_prev + M_LN2)) return false;
    }
    return true;
}

Vec eval_F(const BallHierarchy& h, const Vec& z) {
    if (z.dim() != 2) throw ContractError("eval_F: the map acts on the plane");
    const LusinLevel& lv = h.levels.at(0);
    const double R = lv.outer.to_raw();
    for (double cx : h.roots) {
        const double wx = z[0] - cx, wy = z[1];
        const double rho = std::hypot(wx, wy);
        if (rho > R) continue;
        // Every stage fixes every center; the deeper stages move only
        // radii with no double representation, so the first annulus
        // branch is the entire raw-visible action.
        if (rho == 0.0) return Vec{cx, 0.0};
        const double s = lv.sqrt_scale / (rho * (1.0 - std::log(rho)));
        return Vec{cx + s * wx, s * wy};
    }
    return z;
}

Vec eval_G(const LusinConstruction& c, const Vec& z) {
    if (z.dim() != 2) throw ContractError("eval_G: the map acts on the plane");
    // The outermost climb edge sits around exp(-exp(17)) and deeper, far
    // below the gap between a root and its double neighbours, so exact
    // center hits are the entire nonzero raw locus.
    for (std::size_t i = 0; i < c.balls.roots.size(); ++i)
        if (z[0] == c.balls.roots[i] && z[1] == 0.0) return c.squares.centers[0][i];
    return Vec::zeros(2);
}

Vec eval_G_center(const LusinConstruction& c, std::size_t level, std::size_t index) {
    require_ball(c.balls, level, index, "eval_G_center");
    // Walk the stages that reach this center: each proper ancestor holds
    // it inside its frozen core and rewrites the value to its own square
    // center; the ball's own stage pins the final one.  Later stages stay
    // away: the nearest deeper climb edge sits at a sixteenth of the core
    // radius while the nearest deeper center sits at a quarter of it, a
    // gap the build-time separation certificates guarantee.
    Vec value = Vec::zeros(2);
    for (std::size_t m = 0; m <= level; ++m)
        value = c.squares.centers[m][index >> (2 * (level - m))];
    return value;
}

Vec eval_G_annulus(const LusinConstruction& c, const BumpTables& bump,
                   std::size_t level, std::size_t index, const TierRadius& rho) {
    require_ball(c.balls, level, index, "eval_G_annulus");
    const LusinLevel& lv = c.balls.levels[level];
    const double vs = rho.varsigma();
    // Radii at or above 1/e have no varsigma; they exceed every admissible
    // ball, so the undefined scale itself places them outside.
    if (std::isnan(vs) || vs < lv.outer.varsigma() - 1e-12)
        throw ContractError("eval_G_annulus: the point sits outside the ball");
    if (vs > lv.inner.varsigma() + 1e-12)
        throw ContractError("eval_G_annulus: the point sits inside the frozen core");
    const Vec own = c.squares.centers[level][index];
    const Vec parent =
        level == 0 ? Vec::zeros(2) : c.squares.centers[level - 1][index >> 2];
    if (vs + 1e-12 < lv.mid.varsigma()) return parent;
    double climb = u_eval_tier(bump, rho) - lv.u_mid;
    climb = std::min(std::max(climb, 0.0), lv.span);
    // The parent-to-own distance is exactly the span, so the unit step
    // along the segment costs one division.
    const double ux = (own[0] - parent[0]) / lv.span;
    const double uy = (own[1] - parent[1]) / lv.span;
    return Vec{parent[0] + climb * ux, parent[1] + climb * uy};
}

double annulus_log_distortion(const TierRadius& rho) { return log1p_tau(rho); }

double annulus_log_density_net(const BallHierarchy& h, std::size_t level,
                               const TierRadius& rho) {
    if (level >= h.levels.size())
        throw ContractError("annulus_log_density_net: level beyond the built depth");
    return 2.0 * std::log(h.levels[level].sqrt_scale) - 3.0 * log1p_tau(rho);
}

double dg_margin_log(const BumpTables& bump, const BallHierarchy& h,
                     std::size_t level, const TierRadius& rho) {
    if (level >= h.levels.size())
        throw ContractError("dg_margin_log: level beyond the built depth");
    const std::size_t k = shell_of_height(u_eval_tier(bump, rho));
    const double sig = rho.sigma();
    double part;  // log1p(tau) - log L - log log L
    if (sig <= 700.0) {
        const double tau = rho.tau();
        const double L = log_e_plus_exp(h_rate_log2h(k, tau));
        part = std::log1p(tau) - std::log(L) - std::log(std::log(L));
    } else {
        // Here log L and log1p(tau) agree with sigma to the last bit, so
        // only the third factor survives.
        part = -rho.varsigma();
    }
    return -double(k + 1) * M_LN2 + part - std::log(h.levels[level].sqrt_scale);
}

LevelExpIntegral level_exp_integral(const BallHierarchy& h, double lambda,
                                    std::size_t level) {
    if (!(lambda > 0.0) || !(lambda < 2.0))
        throw ContractError("level_exp_integral: lambda must lie in (0, 2)");
    if (level >= h.levels.size())
        throw ContractError("level_exp_integral: level beyond the built depth");
    const LusinLevel& lv = h.levels[level];
    LevelExpIntegral out;
    const double p = 2.0 - lambda;
    const double big = std::exp(-p * lv.outer.tau());
    const double small = std::exp(-p * lv.inner.tau());
    out.closed_form = 2.0 * M_PI * double(lv.count) * std::exp(lambda) * (big - small) / p;
    if (lv.outer.tier != TierRadius::Tier::Raw) return out;

    // The four annuli carry identical mass; one chart plus its geometric
    // tail, scaled by the count, covers them all.  The tail overshoots
    // the frozen core by a mass below every double, which is exactly the
    // closed form's own rounding of the inner term.
    const double R = lv.outer.v;
    const Vec c0{h.roots[0], 0.0};
    QuadratureTask task;
    task.region = Region::ball(c0, R);
    task.singular_points = {c0};
    task.log_polar = true;
    // Near the critical exponent the chart integrand decays slowly along
    // the depth axis; 1e-7 is what the cell budget can still certify.
    task.rel_tol = 1e-7;
    const auto f = [&c0, lambda](const Vec& x) {
        const double dx = x[0] - c0[0], dy = x[1] - c0[1];
        return std::exp(lambda * (1.0 - 0.5 * std::log(dx * dx + dy * dy)));
    };
    const IntegralResult q = integrate(f, task);
    if (q.inconclusive) throw EvalError("level_exp_integral: quadrature did not converge");
    ShellSettings ss;
    ss.tau_start = log_polar_reach(c0, R) - std::log(R);
    const auto prof = shell_decay_profile(
        [lambda](double tau) {
            return lambda * (1.0 + tau) - 2.0 * tau + std::log(2.0 * M_PI);
        },
        ss);
    if (prof.verdict != ShellVerdict::Convergent)
        throw EvalError("level_exp_integral: the chart tail failed to close");
    out.quadrature = double(lv.count) * (q.value + prof.value);
    out.quad_error = double(lv.count) * q.error_estimate;
    out.quadrature_meaningful = true;
    return out;
}

LusinEvidence lusin_evidence(const LusinConstruction& c, const BumpTables& bump,
                             std::size_t radial_samples, std::size_t axis_samples) {
    const BallHierarchy& h = c.balls;
    LusinEvidence ev;

    for (std::size_t n = 0; n < h.depth; ++n) {
        const std::size_t count = h.levels[n].count;
        for (std::size_t i = 0; i < count; ++i) {
            ++ev.expected_centers;
            const Vec got = eval_G_center(c, n, i);
            const Vec want = c.squares.centers[n][i];
            if (got[0] == want[0] && got[1] == want[1]) ++ev.attained_centers;
        }
    }

    const std::size_t S = std::max<std::size_t>(radial_samples, 8);
    for (std::size_t n = 0; n < h.depth; ++n) {
        const LusinLevel& lv = h.levels[n];
        const Vec parent = n == 0 ? Vec::zeros(2) : c.squares.centers[n - 1][0];
        double sup = 0;
        for (std::size_t j = 0; j < S; ++j) {
            const double uj = lv.u_mid + lv.span * double(j) / double(S - 1);
            const TierRadius rj = radius_of_u(bump, uj);
            const Vec g = eval_G_annulus(c, bump, n, 0, rj);
            sup = std::max(sup, std::hypot(g[0] - parent[0], g[1] - parent[1]));
        }
        ev.step_sup.push_back(sup);
        ev.step_claim.push_back(SquareHierarchy::step(int(n)));
    }

    for (std::size_t n = 0; n < h.depth; ++n) {
        const LusinLevel& lv = h.levels[n];
        const double a = lv.mid.varsigma(), b = lv.inner.varsigma();
        const std::size_t k_lo = shell_of_height(lv.u_mid + 1e-12);
        const std::size_t k_hi = shell_of_height(lv.u_inner - 1e-12);
        double mass = 0;
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const double lo = std::max(a, k > k_lo ? bump.vs_shell[k] : a);
            const double hi = std::min(b, k < k_hi ? bump.vs_shell[k + 1] : b);
            if (hi > lo)
                mass += integrate_line(
                    [k](double vs) { return u_energy_rate_per_varsigma(k, vs); }, lo, hi);
        }
        ev.stage_energy.push_back(2.0 * M_PI * double(lv.count) * mass);
        ev.stage_claim.push_back(std::ldexp(1.0, -int(n) - 1));
    }

    const double R0 = h.levels[0].outer.to_raw();
    std::vector<double> xs;
    const std::size_t A = std::max<std::size_t>(axis_samples, 16);
    for (std::size_t j = 0; j < A; ++j)
        xs.push_back(-1.0 + 2.0 * double(j) / double(A - 1));
    xs.push_back(0.9);
    for (double r : h.roots) {
        xs.push_back(r);
        xs.push_back(r + 0.5 * R0);
        xs.push_back(r - 0.5 * R0);
        xs.push_back(r + R0);
    }
    bool ok = true;
    for (double x : xs) {
        const Vec img = eval_F(h, Vec{x, 0.0});
        ev.worst_axis_drift = std::max(ev.worst_axis_drift, std::abs(img[1]));
        if (std::abs(img[0]) > 1.0 + 1e-12 || std::abs(img[1]) > 1e-12) ok = false;
    }
    ev.segment_preserved = ok;
    ev.axis_samples = xs.size();
    return ev;
}

}  // namespace fdc
