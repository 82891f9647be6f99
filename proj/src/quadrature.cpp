#include "fdc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fdc/errors.hpp"

namespace fdc {

namespace {

// Gauss-Kronrod 7-15 on [-1,1]; the 7 Gauss nodes are a subset of the 15,
// landing at the odd positions of the sorted node list.
constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                            0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                            0.2077849550078985, 0.0};
constexpr double kWgk[8] = {0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
                            0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                            0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                           0.4179591836734694};

struct Rule {
    double x[15];
    double wk[15];
    double wg[15];  // zero at pure Kronrod nodes
};

Rule make_rule() {
    Rule r{};
    for (int i = 0; i < 7; ++i) {
        r.x[i] = -kXgk[i];
        r.x[14 - i] = kXgk[i];
        r.wk[i] = r.wk[14 - i] = kWgk[i];
        if (i % 2 == 1) r.wg[i] = r.wg[14 - i] = kWg[(i - 1) / 2];
    }
    r.x[7] = 0.0;
    r.wk[7] = kWgk[7];
    r.wg[7] = kWg[3];
    return r;
}

const Rule kRule = make_rule();

// One smooth chart: a param box plus an integrand that already carries
// the chart's volume factor.
struct Patch {
    std::size_t dim = 2;
    std::array<double, 3> lo{}, hi{};
    std::function<double(const double*)> f;
};

struct CellEstimate {
    double kronrod = 0;
    double err = 0;
};

CellEstimate eval_cell(const Patch& p, const std::array<double, 3>& lo,
                       const std::array<double, 3>& hi) {
    const std::size_t d = p.dim;
    double mid[3], half[3];
    double scale = 1;
    for (std::size_t i = 0; i < d; ++i) {
        mid[i] = 0.5 * (lo[i] + hi[i]);
        half[i] = 0.5 * (hi[i] - lo[i]);
        scale *= half[i];
    }
    int idx[3] = {0, 0, 0};
    double sk = 0, sg = 0;
    while (true) {
        double pt[3];
        double wk = 1, wg = 1;
        bool gauss = true;
        for (std::size_t i = 0; i < d; ++i) {
            pt[i] = mid[i] + half[i] * kRule.x[idx[i]];
            wk *= kRule.wk[idx[i]];
            if (kRule.wg[idx[i]] == 0.0)
                gauss = false;
            else
                wg *= kRule.wg[idx[i]];
        }
        const double v = p.f(pt);
        sk += wk * v;
        if (gauss) sg += wg * v;

        std::size_t i = 0;
        while (i < d && ++idx[i] == 15) {
            idx[i] = 0;
            ++i;
        }
        if (i == d) break;
    }
    CellEstimate c;
    c.kronrod = sk * scale;
    c.err = std::abs(sk - sg) * scale;
    return c;
}

struct TileOutcome {
    double value = 0;
    double err = 0;
    std::size_t cells = 0;
};

struct RefineCtx {
    const Patch* patch;
    double err_density;  // allowed error per unit of param volume
    std::size_t budget;
    std::size_t used = 0;
};

void refine(RefineCtx& ctx, const std::array<double, 3>& lo, const std::array<double, 3>& hi,
            int depth, TileOutcome& out) {
    const CellEstimate c = eval_cell(*ctx.patch, lo, hi);
    ++ctx.used;
    ++out.cells;

    double vol = 1;
    for (std::size_t i = 0; i < ctx.patch->dim; ++i) vol *= hi[i] - lo[i];

    std::size_t split = 0;
    for (std::size_t i = 1; i < ctx.patch->dim; ++i)
        if (hi[i] - lo[i] > hi[split] - lo[split]) split = i;
    // Below this width the tensor nodes of a child cell would round onto
    // the cell corner, so splitting further only manufactures noise.
    const double w_floor = 1024 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(lo[split]), std::abs(hi[split]));
    const bool splittable = hi[split] - lo[split] > w_floor;

    const bool ok = c.err <= ctx.err_density * vol;
    if (ok || !splittable || depth >= 58 || ctx.used >= ctx.budget) {
        out.value += c.kronrod;
        out.err += c.err;
        return;
    }
    const double mid = 0.5 * (lo[split] + hi[split]);
    std::array<double, 3> left_hi = hi, right_lo = lo;
    left_hi[split] = mid;
    right_lo[split] = mid;
    refine(ctx, lo, left_hi, depth + 1, out);
    refine(ctx, right_lo, hi, depth + 1, out);
}

struct Tile {
    std::size_t patch;
    std::array<double, 3> lo{}, hi{};
};

// Fixed tiling: each patch is halved along its longest side k times,
// giving the same tile list no matter how many threads will run them.
std::vector<Tile> make_tiles(const std::vector<Patch>& patches, std::size_t target) {
    std::size_t per_patch_splits = 0;
    while (patches.size() << (per_patch_splits + 1) <= target) ++per_patch_splits;

    std::vector<Tile> tiles;
    for (std::size_t pi = 0; pi < patches.size(); ++pi) {
        std::vector<Tile> cur = {{pi, patches[pi].lo, patches[pi].hi}};
        for (std::size_t s = 0; s < per_patch_splits; ++s) {
            std::vector<Tile> next;
            for (const Tile& t : cur) {
                std::size_t split = 0;
                for (std::size_t i = 1; i < patches[pi].dim; ++i)
                    if (t.hi[i] - t.lo[i] > t.hi[split] - t.lo[split]) split = i;
                Tile a = t, b = t;
                a.hi[split] = b.lo[split] = 0.5 * (t.lo[split] + t.hi[split]);
                next.push_back(a);
                next.push_back(b);
            }
            cur = std::move(next);
        }
        tiles.insert(tiles.end(), cur.begin(), cur.end());
    }
    return tiles;
}

double pairwise_range(const std::vector<double>& xs, std::size_t a, std::size_t b) {
    if (b - a == 0) return 0;
    if (b - a == 1) return xs[a];
    const std::size_t m = a + (b - a) / 2;
    return pairwise_range(xs, a, m) + pairwise_range(xs, m, b);
}

bool strictly_inside_rect(const Vec& p, const Vec& lo, const Vec& hi) {
    for (std::size_t i = 0; i < p.dim(); ++i)
        if (p[i] <= lo[i] || p[i] >= hi[i]) return false;
    return true;
}

}  // namespace

double log_polar_reach(const Vec& center, double scale) {
    // An off-origin chart center caps the usable depth: once the radius
    // drops under the center's own rounding grain, c + r(cos,sin) lands
    // exactly on c and the sample point degenerates.
    const double cmax = std::max(std::abs(center[0]), std::abs(center[1]));
    if (cmax <= 0) return kLogPolarDepth;
    const double safe =
        std::log(scale / (64 * std::numeric_limits<double>::epsilon() * cmax));
    return std::max(0.1, std::min(kLogPolarDepth, safe));
}

namespace {

std::vector<Patch> build_patches(const ScalarField& g, const QuadratureTask& task) {
    const Region& reg = task.region;
    std::vector<Patch> patches;

    auto add_rect = [&](const Vec& lo, const Vec& hi) {
        const std::size_t d = lo.dim();
        for (std::size_t i = 0; i < d; ++i)
            if (hi[i] - lo[i] <= 0) return;  // degenerate strip
        Patch p;
        p.dim = d;
        for (std::size_t i = 0; i < d; ++i) {
            p.lo[i] = lo[i];
            p.hi[i] = hi[i];
        }
        p.f = [&g, d](const double* u) {
            Vec x = Vec::zeros(d);
            for (std::size_t i = 0; i < d; ++i) x[i] = u[i];
            return g(x);
        };
        patches.push_back(std::move(p));
    };

    // Polar chart about c covering radii (r_hi e^{-depth}, r_hi] with
    // r_hi = scale/cos(theta - axis); scale/cos spans a square side when
    // the arc is an eighth-turn, and a circle when r_hi is constant.
    auto add_log_polar = [&](const Vec& c, double theta_lo, double theta_hi, double axis,
                             double scale, bool over_cos, double depth) {
        depth = std::min(depth, log_polar_reach(c, scale));
        Patch p;
        p.dim = 2;
        p.lo = {0.0, theta_lo, 0};
        p.hi = {depth, theta_hi, 0};
        const double cx = c[0], cy = c[1];
        p.f = [&g, cx, cy, axis, scale, over_cos](const double* u) {
            const double s = u[0], th = u[1];
            const double rh = over_cos ? scale / std::cos(th - axis) : scale;
            const double r = rh * std::exp(-s);
            const Vec x{cx + r * std::cos(th), cy + r * std::sin(th)};
            return g(x) * rh * rh * std::exp(-2.0 * s);
        };
        patches.push_back(std::move(p));
    };

    auto add_polar = [&](const Vec& c, double r_lo, double r_hi) {
        Patch p;
        p.dim = 2;
        p.lo = {r_lo, 0.0, 0};
        p.hi = {r_hi, 6.283185307179586476925286766559, 0};
        const double cx = c[0], cy = c[1];
        p.f = [&g, cx, cy](const double* u) {
            const double r = u[0], th = u[1];
            const Vec x{cx + r * std::cos(th), cy + r * std::sin(th)};
            return g(x) * r;
        };
        patches.push_back(std::move(p));
    };

    constexpr double kTwoPi = 6.283185307179586476925286766559;

    switch (reg.kind) {
        case RegionKind::Rectangle: {
            std::vector<Vec> inside;
            for (const auto& s : task.singular_points)
                if (strictly_inside_rect(s, reg.lo, reg.hi)) inside.push_back(s);
            if (inside.size() > 1)
                throw ContractError("integrate: more than one singular point inside the rectangle");
            if (inside.empty()) {
                if (task.log_polar)
                    throw ContractError("integrate: log-polar transform needs a singular point");
                add_rect(reg.lo, reg.hi);
                break;
            }
            const Vec s = inside.front();
            if (reg.lo.dim() != 2)
                throw ContractError("integrate: singular rectangles are 2d only");
            if (!task.log_polar) {
                // Split at the singular point so it sits at patch corners,
                // which no tensor node ever touches.
                add_rect(reg.lo, s);
                add_rect(s, reg.hi);
                add_rect(Vec{reg.lo[0], s[1]}, Vec{s[0], reg.hi[1]});
                add_rect(Vec{s[0], reg.lo[1]}, Vec{reg.hi[0], s[1]});
                break;
            }
            double d = std::min(std::min(s[0] - reg.lo[0], reg.hi[0] - s[0]),
                                std::min(s[1] - reg.lo[1], reg.hi[1] - s[1]));
            // Centered square via four polar arcs split at the diagonal
            // angles where the boundary distance kinks.
            constexpr double kQuarter = 1.5707963267948966192313216916398;
            for (int k = 0; k < 4; ++k) {
                const double axis = k * kQuarter;
                add_log_polar(s, axis - 0.5 * kQuarter, axis + 0.5 * kQuarter, axis, d, true,
                              kLogPolarDepth);
            }
            // Frame rectangles around the centered square.
            add_rect(Vec{reg.lo[0], reg.lo[1]}, Vec{s[0] - d, reg.hi[1]});
            add_rect(Vec{s[0] + d, reg.lo[1]}, Vec{reg.hi[0], reg.hi[1]});
            add_rect(Vec{s[0] - d, reg.lo[1]}, Vec{s[0] + d, s[1] - d});
            add_rect(Vec{s[0] - d, s[1] + d}, Vec{s[0] + d, reg.hi[1]});
            break;
        }
        case RegionKind::Ball: {
            for (const auto& s : task.singular_points) {
                double d2 = 0;
                for (std::size_t i = 0; i < 2; ++i) {
                    const double d = s[i] - reg.center[i];
                    d2 += d * d;
                }
                if (d2 > 1e-24 && std::sqrt(d2) < reg.r_outer * (1 - 1e-12))
                    throw ContractError("integrate: singular point off the ball center");
            }
            if (task.log_polar)
                add_log_polar(reg.center, 0.0, kTwoPi, 0.0, reg.r_outer, false, kLogPolarDepth);
            else
                add_polar(reg.center, 0.0, reg.r_outer);
            break;
        }
        case RegionKind::Annulus: {
            for (const auto& s : task.singular_points) {
                double d2 = 0;
                for (std::size_t i = 0; i < 2; ++i) {
                    const double d = s[i] - reg.center[i];
                    d2 += d * d;
                }
                const double r = std::sqrt(d2);
                if (r > reg.r_inner * (1 + 1e-12) && r < reg.r_outer * (1 - 1e-12))
                    throw ContractError("integrate: singular point inside the annulus body");
            }
            if (task.log_polar)
                add_log_polar(reg.center, 0.0, kTwoPi, 0.0, reg.r_outer, false,
                              std::log(reg.r_outer / reg.r_inner));
            else
                add_polar(reg.center, reg.r_inner, reg.r_outer);
            break;
        }
    }
    return patches;
}

IntegralResult run(const ScalarField& g, const QuadratureTask& task, bool parallel_pairwise) {
    task.validate();
    const std::vector<Patch> patches = build_patches(g, task);
    const std::vector<Tile> tiles = make_tiles(patches, 32);
    const std::size_t nt = tiles.size();

    // Rough pass for the relative-tolerance scale.
    std::vector<double> rough(nt);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_pairwise)
#endif
    for (long long i = 0; i < static_cast<long long>(nt); ++i) {
        const Tile& t = tiles[static_cast<std::size_t>(i)];
        rough[static_cast<std::size_t>(i)] = eval_cell(patches[t.patch], t.lo, t.hi).kronrod;
    }
    const double i_rough = std::abs(pairwise_range(rough, 0, nt));

    double total_vol = 0;
    for (const Tile& t : tiles) {
        double v = 1;
        for (std::size_t i = 0; i < patches[t.patch].dim; ++i) v *= t.hi[i] - t.lo[i];
        total_vol += v;
    }
    const double target = 0.5 * (task.abs_tol + task.rel_tol * i_rough);
    const double density = target / total_vol;
    const std::size_t tile_budget = std::max<std::size_t>(32, task.max_subdivisions / nt);

    std::vector<TileOutcome> outcomes(nt);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_pairwise)
#endif
    for (long long i = 0; i < static_cast<long long>(nt); ++i) {
        const Tile& t = tiles[static_cast<std::size_t>(i)];
        RefineCtx ctx{&patches[t.patch], density, tile_budget, 0};
        refine(ctx, t.lo, t.hi, 0, outcomes[static_cast<std::size_t>(i)]);
    }

    IntegralResult res;
    if (parallel_pairwise) {
        std::vector<double> vals(nt), errs(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            vals[i] = outcomes[i].value;
            errs[i] = outcomes[i].err;
        }
        res.value = pairwise_range(vals, 0, nt);
        res.error_estimate = pairwise_range(errs, 0, nt);
    } else {
        for (std::size_t i = 0; i < nt; ++i) {
            res.value += outcomes[i].value;
            res.error_estimate += outcomes[i].err;
        }
    }
    for (const auto& o : outcomes) res.cells += o.cells;
    res.inconclusive =
        res.error_estimate > task.abs_tol + task.rel_tol * std::abs(res.value);
    return res;
}

}  // namespace

std::size_t Region::dim() const {
    return kind == RegionKind::Rectangle ? lo.dim() : center.dim();
}

Region Region::rectangle(const Vec& lo, const Vec& hi) {
    Region r;
    r.kind = RegionKind::Rectangle;
    r.lo = lo;
    r.hi = hi;
    return r;
}

Region Region::ball(const Vec& center, double radius) {
    Region r;
    r.kind = RegionKind::Ball;
    r.center = center;
    r.r_outer = radius;
    return r;
}

Region Region::annulus(const Vec& center, double r_inner, double r_outer) {
    Region r;
    r.kind = RegionKind::Annulus;
    r.center = center;
    r.r_inner = r_inner;
    r.r_outer = r_outer;
    return r;
}

void QuadratureTask::validate() const {
    if (rel_tol <= 0 || abs_tol <= 0) throw ContractError("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw ContractError("max_subdivisions must be at least 1");
    switch (region.kind) {
        case RegionKind::Rectangle: {
            const std::size_t d = region.lo.dim();
            if (d < 1 || d > 3 || region.hi.dim() != d)
                throw ContractError("rectangle dimension must be 1..3");
            for (std::size_t i = 0; i < d; ++i)
                if (!(region.lo[i] < region.hi[i]))
                    throw ContractError("rectangle corners out of order");
            break;
        }
        case RegionKind::Ball:
            if (region.center.dim() != 2) throw ContractError("balls are 2d only");
            if (!(region.r_outer > 0)) throw ContractError("ball radius must be positive");
            break;
        case RegionKind::Annulus:
            if (region.center.dim() != 2) throw ContractError("annuli are 2d only");
            if (!(region.r_inner > 0) || !(region.r_inner < region.r_outer))
                throw ContractError("annulus radii must satisfy 0 < inner < outer");
            break;
    }
    for (const auto& s : singular_points)
        if (s.dim() != region.dim()) throw ContractError("singular point dimension mismatch");
}

IntegralResult integrate(const ScalarField& g, const QuadratureTask& task) {
    return run(g, task, true);
}

IntegralResult integrate_serial(const ScalarField& g, const QuadratureTask& task) {
    return run(g, task, false);
}

double pairwise_sum(const std::vector<double>& xs) { return pairwise_range(xs, 0, xs.size()); }

}  // namespace fdc
