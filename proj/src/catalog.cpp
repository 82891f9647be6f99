#include "fdc/catalog.hpp"

#include <cmath>
#include <memory>

#include "fdc/bump.hpp"
#include "fdc/errors.hpp"
#include "fdc/lusin.hpp"

namespace fdc {

namespace {

// Inside the unit disk the radial maps are z -> z/(r t(r)) with
// t(r) = c - log r, whose differential is g I + (g'/r) z z^T for
// g = 1/(r t).  Tangential stretch 1/(r t) dominates the radial
// stretch 1/(r t^2) because t >= c >= 1 there.
struct RadialProfile {
    double c;

    double t(double r) const { return c - std::log(r); }

    Vec value(const Vec& z) const {
        const double r = z.norm();
        if (r > 1.0) return {z[0] / c, z[1] / c};
        const double s = 1.0 / (r * t(r));
        return {z[0] * s, z[1] * s};
    }

    Mat jacobian(const Vec& z) const {
        const double r = z.norm();
        Mat j(2, 2);
        if (r > 1.0) {
            j(0, 0) = j(1, 1) = 1.0 / c;
            return j;
        }
        const double tt = t(r);
        const double g = 1.0 / (r * tt);
        const double q = -(tt - 1.0) / (r * r * r * tt * tt);
        j(0, 0) = g + q * z[0] * z[0];
        j(0, 1) = q * z[0] * z[1];
        j(1, 0) = q * z[0] * z[1];
        j(1, 1) = g + q * z[1] * z[1];
        return j;
    }

    double opnorm(double r) const {
        if (r > 1.0) return 1.0 / c;
        return 1.0 / (r * t(r));
    }

    double det(double r) const {
        if (r > 1.0) return 1.0 / (c * c);
        const double tt = t(r);
        return 1.0 / (r * r * tt * tt * tt);
    }

    double distortion(double r) const {
        if (r > 1.0) return 1.0;
        return t(r);
    }
};

const RadialProfile kLogE{std::exp(1.0)};
const RadialProfile kLog1{1.0};

// Third component: loglog(e + |log r|).  Unbounded at the origin yet
// still W^{1,2}; its gradient is radial.
double third_value(double r) {
    return std::log(std::log(std::exp(1.0) + std::abs(std::log(r))));
}

// Signed radial derivative d/dr of the third component.
double third_deriv(double r) {
    const double lr = std::log(r);
    const double inner = std::exp(1.0) + std::abs(lr);
    const double sign = lr < 0 ? -1.0 : 1.0;
    return sign / (r * inner * std::log(inner));
}

}  // namespace

MapInstance make_radial_log_e() {
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 2;
    f.catalog_id = "radial_log_e";
    f.singular_points = {Vec::zeros(2)};
    f.value = [](const Vec& z) { return kLogE.value(z); };
    f.jacobian = [](const Vec& z) { return kLogE.jacobian(z); };
    f.closed_form_operator_norm = [](const Vec& z) { return kLogE.opnorm(z.norm()); };
    f.closed_form_jacobian_det = [](const Vec& z) { return kLogE.det(z.norm()); };
    f.closed_form_distortion = [](const Vec& z) { return kLogE.distortion(z.norm()); };
    f.distortion_of_tau = [](double tau) { return kLogE.c + tau; };
    f.log_pullback_density_of_tau = [](double tau) { return -3 * std::log(kLogE.c + tau); };
    return f;
}

MapInstance make_radial_log_1() {
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 2;
    f.catalog_id = "radial_log_1";
    f.singular_points = {Vec::zeros(2)};
    f.value = [](const Vec& z) { return kLog1.value(z); };
    f.jacobian = [](const Vec& z) { return kLog1.jacobian(z); };
    f.closed_form_operator_norm = [](const Vec& z) { return kLog1.opnorm(z.norm()); };
    f.closed_form_jacobian_det = [](const Vec& z) { return kLog1.det(z.norm()); };
    f.closed_form_distortion = [](const Vec& z) { return kLog1.distortion(z.norm()); };
    f.distortion_of_tau = [](double tau) { return kLog1.c + tau; };
    f.log_pullback_density_of_tau = [](double tau) { return -3 * std::log(kLog1.c + tau); };
    return f;
}

MapInstance make_loglog_third() {
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 1;
    f.catalog_id = "loglog_third";
    f.singular_points = {Vec::zeros(2)};
    f.value = [](const Vec& z) { return Vec{third_value(z.norm())}; };
    f.jacobian = [](const Vec& z) {
        const double r = z.norm();
        const double d = third_deriv(r);
        Mat j(1, 2);
        j(0, 0) = d * z[0] / r;
        j(0, 1) = d * z[1] / r;
        return j;
    };
    f.closed_form_operator_norm = [](const Vec& z) { return std::abs(third_deriv(z.norm())); };
    return f;
}

MapInstance make_radial_loglog_curve() {
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 3;
    f.catalog_id = "radial_loglog_curve";
    f.singular_points = {Vec::zeros(2)};
    f.value = [](const Vec& z) {
        const Vec pair = kLogE.value(z);
        return Vec{pair[0], pair[1], third_value(z.norm())};
    };
    f.jacobian = [](const Vec& z) {
        const double r = z.norm();
        const Mat top = kLogE.jacobian(z);
        const double d = third_deriv(r);
        Mat j(3, 2);
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) j(a, b) = top(a, b);
        j(2, 0) = d * z[0] / r;
        j(2, 1) = d * z[1] / r;
        return j;
    };
    f.closed_form_operator_norm = [](const Vec& z) {
        const double r = z.norm();
        const double pair_tan = kLogE.opnorm(r);
        double radial;
        if (r > 1.0) {
            radial = 1.0 / std::exp(2.0);
        } else {
            const double tt = kLogE.t(r);
            radial = 1.0 / (r * r * tt * tt * tt * tt);
        }
        const double d = third_deriv(r);
        return std::sqrt(std::max(pair_tan * pair_tan, radial + d * d));
    };
    f.closed_form_jacobian_det = [](const Vec& z) { return kLogE.det(z.norm()); };
    f.closed_form_distortion = [](const Vec& z) {
        const double r = z.norm();
        if (r > 1.0) {
            const double d = third_deriv(r);
            const double e2 = std::exp(2.0);
            return 1.0 + e2 * d * d;
        }
        const double tt = kLogE.t(r);  // equals e + |log r| inside
        const double s = 1.0 / std::log(tt) + 1.0;
        return s * s * tt;
    };
    f.distortion_of_tau = [](double tau) {
        const double tt = kLogE.c + tau;
        const double s = 1.0 / std::log(tt) + 1.0;
        return s * s * tt;
    };
    f.log_pullback_density_of_tau = [](double tau) { return -3 * std::log(kLogE.c + tau); };
    return f;
}

MapInstance make_affine(const Mat& a, const Vec& b) {
    if (a.rows < a.cols) throw ContractError("affine map must not lower dimension");
    if (b.dim() != a.rows) throw ContractError("affine offset dimension mismatch");
    MapInstance f;
    f.domain_dim = a.cols;
    f.ambient_dim = a.rows;
    f.catalog_id = "affine";
    f.value = [a, b](const Vec& x) {
        Vec y = a.apply(x);
        for (std::size_t i = 0; i < y.dim(); ++i) y[i] += b[i];
        return y;
    };
    f.jacobian = [a](const Vec&) { return a; };
    const double on = operator_norm(a);
    f.closed_form_operator_norm = [on](const Vec&) { return on; };
    if (a.rows == a.cols && a.cols <= 4) {
        std::size_t rows_all[4] = {0, 1, 2, 3};
        const double det = rows_det(a, rows_all, a.cols);
        f.closed_form_jacobian_det = [det](const Vec&) { return det; };
        if (det != 0) {
            const double k = std::pow(on, static_cast<double>(a.cols)) / std::abs(det);
            f.distortion_of_tau = [k](double) { return std::max(1.0, k); };
            f.log_pullback_density_of_tau = [det](double tau) {
                return std::log(std::abs(det)) - 2 * tau;
            };
        }
    }
    return f;
}

MapInstance make_orlicz_bump(std::size_t bump_depth) {
    auto tables = std::make_shared<BumpTables>(build_bump_tables(2, bump_depth));
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 1;
    f.catalog_id = "orlicz_bump_u";
    f.singular_points = {Vec::zeros(2)};
    f.value = [tables](const Vec& z) -> Vec { return {u_eval(*tables, z.norm())}; };
    // Raw radii never reach below shell 2, so the shell index is a
    // two-way split at a_2.
    f.jacobian = [tables](const Vec& z) {
        const double r = z.norm();
        const double h = h_rate(r >= tables->a[2].v ? 1 : 2, r);
        Mat j(1, 2);
        j(0, 0) = -h * z[0] / r;
        j(0, 1) = -h * z[1] / r;
        return j;
    };
    f.closed_form_operator_norm = [tables](const Vec& z) {
        const double r = z.norm();
        return h_rate(r >= tables->a[2].v ? 1 : 2, r);
    };
    return f;
}

namespace {

struct LusinBundle {
    BumpTables bump;
    LusinConstruction cons;
};

std::shared_ptr<LusinBundle> build_lusin_bundle(double lambda, double eps,
                                                std::size_t depth,
                                                std::size_t bump_depth) {
    auto b = std::make_shared<LusinBundle>();
    b->bump = build_bump_tables(2, bump_depth);
    b->cons = build_hierarchy(lambda, eps, depth, b->bump);
    return b;
}

std::vector<Vec> lusin_centers(const BallHierarchy& h) {
    std::vector<Vec> c;
    for (double r : h.roots) c.push_back(Vec{r, 0.0});
    return c;
}

MapInstance lusin_F_impl(std::shared_ptr<LusinBundle> b) {
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 2;
    f.catalog_id = "lusin_F";
    f.singular_points = lusin_centers(b->cons.balls);
    f.value = [b](const Vec& z) { return eval_F(b->cons.balls, z); };
    const double A = b->cons.balls.levels[0].sqrt_scale;
    const double R = b->cons.balls.levels[0].outer.to_raw();
    const double tauR = -std::log(R);
    // Radial about whichever center claims the point; identity elsewhere.
    auto local = [b, R](const Vec& z, double& wx, double& wy, double& rho) {
        for (double cx : b->cons.balls.roots) {
            wx = z[0] - cx;
            wy = z[1];
            rho = std::hypot(wx, wy);
            if (rho <= R) return true;
        }
        return false;
    };
    f.jacobian = [local, A](const Vec& z) {
        double wx, wy, rho;
        Mat j(2, 2);
        if (!local(z, wx, wy, rho)) {
            j(0, 0) = j(1, 1) = 1.0;
            return j;
        }
        if (rho == 0.0)
            throw EvalError("lusin_F: the stretch at a center has no double representation");
        const double t = 1.0 - std::log(rho);
        const double tang = A / (rho * t);
        const double rad = A / (rho * t * t);
        const double ex = wx / rho, ey = wy / rho;
        j(0, 0) = tang + (rad - tang) * ex * ex;
        j(0, 1) = (rad - tang) * ex * ey;
        j(1, 0) = j(0, 1);
        j(1, 1) = tang + (rad - tang) * ey * ey;
        return j;
    };
    f.closed_form_operator_norm = [local, A](const Vec& z) {
        double wx, wy, rho;
        if (!local(z, wx, wy, rho)) return 1.0;
        if (rho == 0.0)
            throw EvalError("lusin_F: the stretch at a center has no double representation");
        return A / (rho * (1.0 - std::log(rho)));
    };
    f.closed_form_jacobian_det = [local, A](const Vec& z) {
        double wx, wy, rho;
        if (!local(z, wx, wy, rho)) return 1.0;
        if (rho == 0.0)
            throw EvalError("lusin_F: the stretch at a center has no double representation");
        const double t = 1.0 - std::log(rho);
        return A * A / (rho * rho * t * t * t);
    };
    f.closed_form_distortion = [local](const Vec& z) {
        double wx, wy, rho;
        if (!local(z, wx, wy, rho)) return 1.0;
        if (rho == 0.0)
            throw EvalError("lusin_F: the stretch at a center has no double representation");
        return 1.0 - std::log(rho);
    };
    f.distortion_of_tau = [tauR](double tau) { return tau >= tauR ? 1.0 + tau : 1.0; };
    f.log_pullback_density_of_tau = [tauR, A](double tau) {
        if (tau < tauR) return -2.0 * tau;
        return 2.0 * std::log(A) - 3.0 * std::log1p(tau);
    };
    return f;
}

}  // namespace

MapInstance make_lusin_F(double lambda, double eps, std::size_t depth,
                         std::size_t bump_depth) {
    return lusin_F_impl(build_lusin_bundle(lambda, eps, depth, bump_depth));
}

MapInstance make_lusin_G(double lambda, double eps, std::size_t depth,
                         std::size_t bump_depth) {
    auto b = build_lusin_bundle(lambda, eps, depth, bump_depth);
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 2;
    f.catalog_id = "lusin_G";
    f.singular_points = lusin_centers(b->cons.balls);
    f.value = [b](const Vec& z) { return eval_G(b->cons, z); };
    // The climb zones start far below the subnormal range, so the raw
    // gradient is zero off the centers and the determinant vanishes with
    // the rank-one structure everywhere else.
    f.jacobian = [](const Vec&) { return Mat(2, 2); };
    f.closed_form_operator_norm = [](const Vec&) { return 0.0; };
    f.closed_form_jacobian_det = [](const Vec&) { return 0.0; };
    return f;
}

MapInstance make_lusin_curve(double lambda, double eps, std::size_t depth,
                             std::size_t bump_depth) {
    auto b = build_lusin_bundle(lambda, eps, depth, bump_depth);
    const MapInstance F = lusin_F_impl(b);
    MapInstance f;
    f.domain_dim = 2;
    f.ambient_dim = 4;
    f.catalog_id = "lusin_curve";
    f.singular_points = F.singular_points;
    auto fval = F.value;
    f.value = [fval, b](const Vec& z) {
        const Vec a = fval(z);
        const Vec g = eval_G(b->cons, z);
        Vec out = Vec::zeros(4);
        out[0] = a[0];
        out[1] = a[1];
        out[2] = g[0];
        out[3] = g[1];
        return out;
    };
    auto fjac = F.jacobian;
    // The climb rows are zero at every raw point off the centers, where
    // the stacked jacobian is undefined anyway.
    f.jacobian = [fjac](const Vec& z) {
        const Mat a = fjac(z);
        Mat j(4, 2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t cidx = 0; cidx < 2; ++cidx) j(r, cidx) = a(r, cidx);
        return j;
    };
    f.closed_form_operator_norm = F.closed_form_operator_norm;
    f.distortion_of_tau = F.distortion_of_tau;
    f.log_pullback_density_of_tau = F.log_pullback_density_of_tau;
    return f;
}

std::vector<std::string> catalog_ids() {
    return {"radial_log_e", "loglog_third", "radial_loglog_curve", "radial_log_1",
            "affine",       "orlicz_bump_u", "lusin_F",            "lusin_G",
            "lusin_curve"};
}

MapInstance catalog_map(const std::string& id, const CatalogParams& params) {
    if (id == "radial_log_e") return make_radial_log_e();
    if (id == "loglog_third") return make_loglog_third();
    if (id == "radial_loglog_curve") return make_radial_loglog_curve();
    if (id == "radial_log_1") return make_radial_log_1();
    if (id == "affine") return make_affine(params.affine_a, params.affine_b);
    if (id == "orlicz_bump_u") return make_orlicz_bump(params.bump_depth);
    if (id == "lusin_F")
        return make_lusin_F(params.lambda, params.eps, params.depth, params.bump_depth);
    if (id == "lusin_G")
        return make_lusin_G(params.lambda, params.eps, params.depth, params.bump_depth);
    if (id == "lusin_curve")
        return make_lusin_curve(params.lambda, params.eps, params.depth, params.bump_depth);
    throw ContractError("unknown catalog id: " + id);
}

}  // namespace fdc
