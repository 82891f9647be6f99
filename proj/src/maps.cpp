#include "fdc/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdc/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fdc {

Vec MapInstance::eval(const Vec& x) const {
    if (!value) throw ContractError("map has no evaluator");
    return value(x);
}

Mat MapInstance::jac(const Vec& x) const {
    if (jacobian) return jacobian(x);
    return fd_jacobian(*this, x);
}

Mat fd_jacobian(const MapInstance& f, const Vec& x, double step_scale) {
    const double h = step_scale * std::max(1.0, x.norm());
    Mat j(f.ambient_dim, f.domain_dim);
    for (std::size_t c = 0; c < f.domain_dim; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const Vec fp = f.eval(xp), fm = f.eval(xm);
        for (std::size_t r = 0; r < f.ambient_dim; ++r) j(r, c) = (fp[r] - fm[r]) / (2 * h);
    }
    return j;
}

double star_pullback(const MapInstance& f, const VolumeForm& w, const Vec& x) {
    if (f.ambient_dim != w.ambient_dim || f.domain_dim != w.degree)
        throw ContractError("star_pullback: map and form dimensions do not match");
    return star_pullback(f.jac(x), w, f.eval(x));
}

DistortionSample distortion_at(const MapInstance& f, const VolumeForm& w, const Vec& x,
                               const ComassSettings& opt) {
    for (const auto& s : f.singular_points) {
        bool same = s.dim() == x.dim();
        for (std::size_t i = 0; same && i < x.dim(); ++i) same = (s[i] == x[i]);
        if (same) throw ContractError("distortion_at: x is a singular point of the map");
    }
    const Mat j = f.jac(x);
    const Vec fx = f.eval(x);

    DistortionSample out;
    out.x = x;
    out.star = star_pullback(j, w, fx);
    out.opnorm = operator_norm(j);
    out.comass_at_image = comass(w, fx, opt).value;

    if (out.opnorm == 0.0) {
        out.K = 1.0;
        return out;
    }
    if (out.star > 0.0) {
        double p = 1.0;
        for (std::size_t i = 0; i < f.domain_dim; ++i) p *= out.opnorm;
        out.K = std::max(1.0, out.comass_at_image * p / out.star);
        return out;
    }
    out.finite_distortion = false;
    out.K = std::numeric_limits<double>::infinity();
    return out;
}

namespace {

struct FlaggedNode {
    Vec x;
    double peak;
    std::size_t argmax_term;
};

bool near_singular(const MapInstance& f, const Vec& x, double tol) {
    for (const auto& s : f.singular_points) {
        if (s.dim() != x.dim()) continue;
        double d2 = 0;
        for (std::size_t i = 0; i < x.dim(); ++i) {
            const double d = s[i] - x[i];
            d2 += d * d;
        }
        if (d2 <= tol * tol) return true;
    }
    return false;
}

}  // namespace

ConditionDReport condition_D_scan(const MapInstance& f, const VolumeForm& w, const Vec& lo,
                                  const Vec& hi, const GridSpec& spec) {
    if (f.ambient_dim != w.ambient_dim || f.domain_dim != w.degree)
        throw ContractError("condition_D_scan: map and form dimensions do not match");
    if (lo.dim() != f.domain_dim || hi.dim() != f.domain_dim)
        throw ContractError("condition_D_scan: region dimension mismatch");
    const std::size_t n = f.domain_dim;

    ConditionDReport report;
    std::vector<FlaggedNode> deepest_flags;

    for (std::size_t level = 1; level <= spec.max_level; ++level) {
        const double h = std::ldexp(1.0, 1 - static_cast<int>(level));
        const double threshold = spec.threshold_base * static_cast<double>(level * level);
        const double sing_tol = 1e-9 * std::min(1.0, h);

        std::size_t counts[8] = {0};
        for (std::size_t d = 0; d < n; ++d)
            counts[d] = static_cast<std::size_t>(std::floor((hi[d] - lo[d]) / h + 1e-9)) + 1;

        std::size_t rows = counts[0];
        std::vector<std::vector<FlaggedNode>> per_row(rows);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (long long ri = 0; ri < static_cast<long long>(rows); ++ri) {
            // Odometer over the remaining dimensions; row-local results keep
            // the merged order independent of the thread count.
            std::size_t odo[8] = {0};
            auto& sink = per_row[static_cast<std::size_t>(ri)];
            while (true) {
                Vec x = Vec::zeros(n);
                x[0] = lo[0] + static_cast<double>(ri) * h;
                for (std::size_t d = 1; d < n; ++d) x[d] = lo[d] + static_cast<double>(odo[d]) * h;

                if (!near_singular(f, x, sing_tol)) {
                    const Mat j = f.jac(x);
                    double peak = 0;
                    std::size_t arg = 0;
                    bool finite = true;
                    for (std::size_t t = 0; t < w.terms.size(); ++t) {
                        const double minor =
                            std::abs(rows_det(j, w.terms[t].index.idx.data(), w.degree));
                        if (!std::isfinite(minor)) {
                            finite = false;
                            break;
                        }
                        if (minor > peak) {
                            peak = minor;
                            arg = t;
                        }
                    }
                    if (finite && peak > threshold) sink.push_back({x, peak, arg});
                }

                std::size_t d = 1;
                while (d < n && ++odo[d] >= counts[d]) {
                    odo[d] = 0;
                    ++d;
                }
                if (d >= n) break;
            }
        }

        std::vector<FlaggedNode> flags;
        for (auto& row : per_row)
            for (auto& fn : row) flags.push_back(fn);

        report.exceed_counts.push_back(flags.size());
        if (!flags.empty() && report.crossing_level == 0) report.crossing_level = level;
        if (level == spec.max_level) deepest_flags = std::move(flags);
    }

    // Single-linkage clusters at the deepest level, link radius 2.5h.
    const double h = std::ldexp(1.0, 1 - static_cast<int>(spec.max_level));
    const double link2 = (2.5 * h) * (2.5 * h);
    std::vector<long long> parent(deepest_flags.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<long long>(i);
    std::function<long long(long long)> find = [&](long long a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    for (std::size_t i = 0; i < deepest_flags.size(); ++i)
        for (std::size_t j = i + 1; j < deepest_flags.size(); ++j) {
            double d2 = 0;
            for (std::size_t d = 0; d < n; ++d) {
                const double dd = deepest_flags[i].x[d] - deepest_flags[j].x[d];
                d2 += dd * dd;
            }
            if (d2 <= link2) parent[find(static_cast<long long>(i))] = find(static_cast<long long>(j));
        }

    std::vector<long long> roots;
    for (std::size_t i = 0; i < deepest_flags.size(); ++i) {
        const long long r = find(static_cast<long long>(i));
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    for (long long r : roots) {
        ConditionDCluster c;
        c.center = Vec::zeros(n);
        std::size_t peak_i = 0;
        for (std::size_t i = 0; i < deepest_flags.size(); ++i) {
            if (find(static_cast<long long>(i)) != r) continue;
            ++c.nodes;
            for (std::size_t d = 0; d < n; ++d) c.center[d] += deepest_flags[i].x[d];
            if (deepest_flags[i].peak > c.peak) {
                c.peak = deepest_flags[i].peak;
                peak_i = i;
            }
        }
        for (std::size_t d = 0; d < n; ++d) c.center[d] /= static_cast<double>(c.nodes);
        c.dominant = w.terms[deepest_flags[peak_i].argmax_term].index;
        for (std::size_t i = 0; i < deepest_flags.size(); ++i)
            if (find(static_cast<long long>(i)) == r &&
                deepest_flags[i].argmax_term != deepest_flags[peak_i].argmax_term)
                c.single_dominant = false;
        if (!c.single_dominant) report.one_dominant_per_cluster = false;
        report.clusters.push_back(c);
    }
    return report;
}

}  // namespace fdc
