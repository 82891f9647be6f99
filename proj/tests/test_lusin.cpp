#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "fdc/bump.hpp"
#include "fdc/catalog.hpp"
#include "fdc/errors.hpp"
#include "fdc/lusin.hpp"
#include "fdc/maps.hpp"

using namespace fdc;

namespace {

const double kPi = 3.14159265358979323846264338327950288;

double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

// Composite Simpson, deliberately independent of the adaptive engine the
// implementation integrates with.
double simpson(const std::function<double(double)>& g, double a, double b,
               std::size_t panels) {
    const double w = (b - a) / double(2 * panels);
    double s = g(a) + g(b);
    for (std::size_t i = 1; i < 2 * panels; ++i)
        s += g(a + w * double(i)) * (i % 2 ? 4.0 : 2.0);
    return s * w / 3.0;
}

const BumpTables& tables() {
    static const BumpTables t = build_bump_tables();
    return t;
}

const LusinConstruction& chain_flat() {
    static const LusinConstruction c = build_hierarchy(1.0, 0.25, 6, tables());
    return c;
}

const LusinConstruction& chain_steep() {
    static const LusinConstruction c = build_hierarchy(1.5, 0.25, 6, tables());
    return c;
}

const LusinConstruction& chain_five() {
    static const LusinConstruction c = build_hierarchy(1.0, 0.25, 5, tables());
    return c;
}

// Anchors from a 40-digit replay of the level recursion.
struct ChainGold {
    double lambda;
    double r0, sqrt_a0, sigma_mid0, u_mid0;
    double u_inner[6];
    double sigma[6];
};

const ChainGold kGoldFlat = {
    1.0,
    5.85498315243191680e-02,
    2.24707055649315451e-01,
    1.78009541731636567e+01,
    2.51097482749523593e+00,
    {3.21808160868178339, 3.57163499927505734, 3.74841169457169432,
     3.83680004222001259, 3.88099421604417172, 3.90309130295625151},
    {2.91660066990501909e+04, 8.34867503215869423e+06, 1.41249802562046766e+08,
     5.80995803891350865e+08, 1.17832629414636397e+09, 1.67807688664838338e+09},
};

const ChainGold kGoldSteep = {
    1.5,
    3.15280293569623069e-04,
    2.85708530951111648e-03,
    1.40002819890752608e+03,
    3.02829964002658647e+00,
    {3.73540642121313393, 4.08895981180640788, 4.26573650710304442,
     4.35412485475136268, 4.39831902857552226, 4.42041611548760205},
    {1.14714404283759922e+08, 1.36305890905359589e+11, 3.90171201659487031e+13,
     6.60123971618388875e+14, 2.71525517630305950e+15, 5.50684970205611600e+15},
};

void check_chain(const LusinConstruction& c, const ChainGold& g) {
    const BallHierarchy& h = c.balls;
    REQUIRE(h.levels.size() == 6);
    REQUIRE(h.roots.size() == 4);
    CHECK(h.roots[0] == -0.75);
    CHECK(h.roots[1] == -0.25);
    CHECK(h.roots[2] == 0.25);
    CHECK(h.roots[3] == 0.75);

    const LusinLevel& l0 = h.levels[0];

    // The level-0 radius solves the packing ceiling in closed form.
    const double log_cap = (std::log(2.0 - g.lambda) - std::log(2.0 * kPi) -
                            g.lambda) / (2.0 - g.lambda);
    CHECK(rel_err(l0.cap, std::exp(log_cap)) < 1e-13);
    CHECK(l0.outer.tier == TierRadius::Tier::Raw);
    CHECK(rel_err(l0.outer.v, g.r0) < 1e-14);

    // Linear compression at the seam and the climb edge it forces.
    const double sqrt_a0 = g.r0 * (1.0 - std::log(g.r0));
    CHECK(rel_err(l0.sqrt_scale, sqrt_a0) < 1e-13);
    CHECK(rel_err(l0.sqrt_scale, g.sqrt_a0) < 1e-13);
    CHECK(rel_err(l0.sigma_mid, 1.0 / (0.25 * g.sqrt_a0)) < 1e-13);
    CHECK(rel_err(l0.sigma_mid, g.sigma_mid0) < 1e-13);
    CHECK(rel_err(l0.u_mid, g.u_mid0) < 1e-10);

    for (std::size_t n = 0; n < 6; ++n) {
        const LusinLevel& lv = h.levels[n];
        CHECK(lv.count == (std::size_t(4) << (2 * n)));
        CHECK(rel_err(lv.u_inner, g.u_inner[n]) < 1e-10);
        CHECK(rel_err(lv.inner.sigma(), g.sigma[n]) < 1e-8);
        CHECK(lv.span == SquareHierarchy::step(int(n) - 1));
        CHECK(lv.sqrt_scale == l0.sqrt_scale / std::ldexp(1.0, 3 * int(n)));
        if (n > 0) {
            // Nesting by 8 collapses to the parent scale: the climb of one
            // level starts exactly at the height the previous one reached.
            CHECK(rel_err(lv.u_mid, h.levels[n - 1].u_inner) < 1e-9);
            CHECK(rel_err(lv.u_inner - lv.u_mid, lv.span) < 1e-8);
        }
    }
}

}  // namespace

TEST_CASE("level chains land on their closed anchors") {
    check_chain(chain_flat(), kGoldFlat);
    check_chain(chain_steep(), kGoldSteep);
}

TEST_CASE("level-0 radius honors the packing ceiling") {
    // Far from the critical exponent the ceiling stops binding and the
    // segment packing bound takes over.
    const LusinConstruction c = build_hierarchy(0.2, 1.0, 2, tables());
    CHECK(c.balls.levels[0].outer.v == 0.125);
    CHECK(c.balls.levels[0].cap > 0.125);

    // Both frozen chains sit on the ceiling side of the minimum.
    CHECK(chain_flat().balls.levels[0].cap == chain_flat().balls.levels[0].outer.v);
    CHECK(chain_steep().balls.levels[0].cap == chain_steep().balls.levels[0].outer.v);
}

TEST_CASE("square family mirrors the quadrant tree") {
    const SquareHierarchy& s = chain_five().squares;
    REQUIRE(s.centers.size() == 5);
    for (std::size_t n = 0; n < 5; ++n)
        REQUIRE(s.centers[n].size() == (std::size_t(4) << (2 * n)));

    CHECK(s.centers[0][0][0] == -0.5);
    CHECK(s.centers[0][0][1] == 0.5);
    CHECK(s.centers[0][1][0] == -0.5);
    CHECK(s.centers[0][1][1] == -0.5);
    CHECK(s.centers[0][2][0] == 0.5);
    CHECK(s.centers[0][2][1] == 0.5);
    CHECK(s.centers[0][3][0] == 0.5);
    CHECK(s.centers[0][3][1] == -0.5);

    // Children of the first level-0 square, quadrant order again.
    CHECK(s.centers[1][0][0] == -0.75);
    CHECK(s.centers[1][0][1] == 0.75);
    CHECK(s.centers[1][1][0] == -0.75);
    CHECK(s.centers[1][1][1] == 0.25);
    CHECK(s.centers[1][2][0] == -0.25);
    CHECK(s.centers[1][2][1] == 0.75);
    CHECK(s.centers[1][3][0] == -0.25);
    CHECK(s.centers[1][3][1] == 0.25);

    // Every child sits one step from its parent; level 0 sits one step
    // from the origin.
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(rel_err(std::hypot(s.centers[0][i][0], s.centers[0][i][1]),
                      SquareHierarchy::step(-1)) < 1e-15);
    for (std::size_t n = 1; n < 5; ++n)
        for (std::size_t i = 0; i < s.centers[n].size(); ++i) {
            const Vec& child = s.centers[n][i];
            const Vec& parent = s.centers[n - 1][i >> 2];
            const double d = std::hypot(child[0] - parent[0], child[1] - parent[1]);
            CHECK(rel_err(d, SquareHierarchy::step(int(n) - 1)) < 1e-15);
        }
}

TEST_CASE("ball map compresses annuli and fixes centers") {
    const BallHierarchy& h = chain_five().balls;
    const double r0 = h.levels[0].outer.v;
    const double sa = h.levels[0].sqrt_scale;

    // Identity away from every ball.
    const Vec far = eval_F(h, Vec{0.9, 0.3});
    CHECK(far[0] == 0.9);
    CHECK(far[1] == 0.3);

    // Centers stay put.
    const Vec at_c = eval_F(h, Vec{0.75, 0.0});
    CHECK(at_c[0] == 0.75);
    CHECK(at_c[1] == 0.0);

    // Inside the annulus the image follows the radial compression exactly.
    {
        const Vec z{0.76, 0.01};
        const double rho = std::hypot(0.01, 0.01);
        const double s = sa / (rho * (1.0 - std::log(rho)));
        const Vec img = eval_F(h, z);
        CHECK(rel_err(img[0], 0.75 + s * 0.01) < 1e-14);
        CHECK(rel_err(img[1], s * 0.01) < 1e-14);
    }

    // The seam at the ball boundary is continuous.
    {
        const Vec just_in = eval_F(h, Vec{0.25 + r0 * (1.0 - 1e-12), 0.0});
        const Vec just_out = eval_F(h, Vec{0.25 + r0 * (1.0 + 1e-12), 0.0});
        CHECK(std::abs(just_in[0] - just_out[0]) < 1e-10);
        CHECK(std::abs(just_in[1] - just_out[1]) < 1e-10);
    }

    // Points of the segment map to points of the segment.
    for (double x : {-0.75 + 0.3 * r0, 0.75 - 0.9 * r0, -0.25 + 0.999 * r0}) {
        const Vec img = eval_F(h, Vec{x, 0.0});
        CHECK(img[1] == 0.0);
        CHECK(std::abs(img[0]) <= 1.0);
    }
}

TEST_CASE("climb map lands on every square center") {
    const LusinConstruction& c = chain_five();

    // Raw evaluation sees only the root centers; everything else in the
    // plane has already collapsed to the origin at double precision.
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec img = eval_G(c, Vec{c.balls.roots[i], 0.0});
        CHECK(img[0] == c.squares.centers[0][i][0]);
        CHECK(img[1] == c.squares.centers[0][i][1]);
    }
    const Vec off = eval_G(c, Vec{0.3, 0.0});
    CHECK(off[0] == 0.0);
    CHECK(off[1] == 0.0);
    const Vec near_root = eval_G(c, Vec{0.75, 1e-300});
    CHECK(near_root[0] == 0.0);
    CHECK(near_root[1] == 0.0);

    // The tiered walk reaches the full tree.
    for (std::size_t n = 0; n < 5; ++n)
        for (std::size_t i = 0; i < c.squares.centers[n].size(); i += 7) {
            const Vec got = eval_G_center(c, n, i);
            CHECK(got[0] == c.squares.centers[n][i][0]);
            CHECK(got[1] == c.squares.centers[n][i][1]);
        }
    CHECK_THROWS_AS(eval_G_center(c, 0, 4), ContractError);
    CHECK_THROWS_AS(eval_G_center(c, 5, 0), ContractError);
}

TEST_CASE("climb zones interpolate between parent and child") {
    const LusinConstruction& c = chain_five();
    const BumpTables& bt = tables();
    const LusinLevel& lv = c.balls.levels[1];

    // Level 1 index 6: parent is square 1, child quadrant NE.
    const Vec parent{-0.5, -0.5};
    const Vec own{-0.25, -0.25};

    const Vec at_mid = eval_G_annulus(c, bt, 1, 6, lv.mid);
    CHECK(at_mid[0] == parent[0]);
    CHECK(at_mid[1] == parent[1]);

    const Vec at_inner = eval_G_annulus(c, bt, 1, 6, lv.inner);
    CHECK(rel_err(at_inner[0], own[0]) < 1e-10);
    CHECK(rel_err(at_inner[1], own[1]) < 1e-10);

    const TierRadius half = radius_of_u(bt, lv.u_mid + 0.5 * lv.span);
    const Vec at_half = eval_G_annulus(c, bt, 1, 6, half);
    CHECK(rel_err(at_half[0], -0.375) < 1e-8);
    CHECK(rel_err(at_half[1], -0.375) < 1e-8);

    // The climb is monotone along the profile height and stays on the
    // diagonal from parent to child.
    double prev_x = parent[0] - 1e-15;
    for (int j = 0; j <= 8; ++j) {
        const double u = lv.u_mid + lv.span * double(j) / 8.0;
        const Vec v = eval_G_annulus(c, bt, 1, 6, radius_of_u(bt, u));
        CHECK(v[0] >= prev_x - 1e-12);
        CHECK(std::abs((v[1] - parent[1]) - (v[0] - parent[0])) < 1e-12);
        prev_x = v[0];
    }

    // Above the ball the value is still the parent's; past the frozen core
    // or outside the ball the annulus chart refuses.
    const TierRadius above = TierRadius::from_varsigma(
        0.5 * (lv.outer.varsigma() + lv.mid.varsigma()));
    const Vec frozen = eval_G_annulus(c, bt, 1, 6, above);
    CHECK(frozen[0] == parent[0]);
    CHECK(frozen[1] == parent[1]);
    CHECK_THROWS_AS(eval_G_annulus(c, bt, 1, 6,
                                   TierRadius::from_varsigma(lv.inner.varsigma() + 1.0)),
                    ContractError);
    CHECK_THROWS_AS(eval_G_annulus(c, bt, 1, 6, TierRadius::raw(0.5)), ContractError);
}

TEST_CASE("annulus charts expose distortion and density") {
    // Raw radii admit a direct recomputation.
    const double rho = 0.01;
    const double t = 1.0 - std::log(rho);
    CHECK(rel_err(annulus_log_distortion(TierRadius::raw(rho)), std::log(t)) < 1e-14);

    // The same radius through deeper tiers agrees.
    const TierRadius raw = TierRadius::raw(rho);
    CHECK(rel_err(annulus_log_distortion(TierRadius::from_tau(raw.tau())),
                  std::log(t)) < 1e-12);
    CHECK(rel_err(annulus_log_distortion(TierRadius::from_sigma(raw.sigma())),
                  std::log(t)) < 1e-12);

    for (const LusinConstruction* c : {&chain_flat(), &chain_steep()}) {
        const double sa = c->balls.levels[0].sqrt_scale;
        const double want = 2.0 * std::log(sa) - 3.0 * std::log(t);
        CHECK(rel_err(annulus_log_density_net(c->balls, 0, raw), want) < 1e-12);
    }
}

TEST_CASE("stretch certificates hold through every climb zone") {
    const BumpTables& bt = tables();
    const double bound = std::log(0.25);

    for (const LusinConstruction* c : {&chain_flat(), &chain_steep()}) {
        const BallHierarchy& h = c->balls;
        for (std::size_t n = 0; n < h.levels.size(); ++n) {
            const LusinLevel& lv = h.levels[n];
            for (int j = 0; j <= 8; ++j) {
                const double u = lv.u_mid + lv.span * double(j) / 8.0;
                const double m = dg_margin_log(bt, h, n, radius_of_u(bt, u));
                CHECK(m <= bound + 1e-9);
            }
        }
    }

    // At the climb edge of level 0 the margin is exactly the shell slack.
    const double top = dg_margin_log(bt, chain_flat().balls, 0,
                                     chain_flat().balls.levels[0].mid);
    CHECK(rel_err(top, bound - 3.0 * M_LN2) < 1e-6);
}

TEST_CASE("annulus masses match the closed exponential") {
    // On the ceiling side the level-0 mass is exactly 4, whatever the
    // exponent, because the ceiling was chosen to make it so.
    for (const LusinConstruction* c : {&chain_flat(), &chain_steep()}) {
        const LevelExpIntegral m = level_exp_integral(c->balls, c->balls.lambda, 0);
        CHECK(rel_err(m.closed_form, 4.0) < 1e-12);
        CHECK(m.quadrature_meaningful);
        CHECK(rel_err(m.quadrature, m.closed_form) < 1e-6);
    }

    // A foreign exponent over the same annuli: antiderivative recomputed
    // here from scratch, quadrature still within its own error budget.
    {
        const BallHierarchy& h = chain_flat().balls;
        const double r0 = h.levels[0].outer.v;
        const LevelExpIntegral m = level_exp_integral(h, 1.5, 0);
        const double want = 16.0 * kPi * std::exp(1.5) * std::sqrt(r0);
        CHECK(rel_err(m.closed_form, want) < 1e-12);
        CHECK(m.quadrature_meaningful);
        CHECK(rel_err(m.quadrature, m.closed_form) < 1e-5);
    }

    // Deeper annuli sit below double range on both routes.
    const LevelExpIntegral deep = level_exp_integral(chain_flat().balls, 1.0, 3);
    CHECK(deep.closed_form == 0.0);
    CHECK(deep.quadrature == 0.0);
    CHECK_FALSE(deep.quadrature_meaningful);

    CHECK_THROWS_AS(level_exp_integral(chain_flat().balls, 2.0, 0), ContractError);
    CHECK_THROWS_AS(level_exp_integral(chain_flat().balls, 0.0, 0), ContractError);
    CHECK_THROWS_AS(level_exp_integral(chain_flat().balls, 1.0, 6), ContractError);
}

TEST_CASE("evidence counts every center and measures the real steps") {
    const LusinConstruction& c = chain_five();
    const BumpTables& bt = tables();
    const LusinEvidence ev = lusin_evidence(c, bt, 32, 256);

    CHECK(ev.expected_centers == 1364);
    CHECK(ev.attained_centers == 1364);
    CHECK(ev.segment_preserved);
    CHECK(ev.worst_axis_drift == 0.0);
    CHECK(ev.axis_samples >= 256);

    REQUIRE(ev.step_sup.size() == 5);
    REQUIRE(ev.stage_energy.size() == 5);
    for (std::size_t n = 0; n < 5; ++n) {
        // The measured sup of one climb stage is the parent step, which is
        // twice the halved pattern it is usually compared against.
        CHECK(rel_err(ev.step_sup[n], SquareHierarchy::step(int(n) - 1)) < 1e-12);
        CHECK(rel_err(ev.step_claim[n], SquareHierarchy::step(int(n))) < 1e-12);
        CHECK(rel_err(ev.step_sup[n], 2.0 * ev.step_claim[n]) < 1e-12);

        // Stage energies overshoot the halving pattern at every level.
        CHECK(rel_err(ev.stage_claim[n], std::ldexp(1.0, -int(n) - 1)) < 1e-15);
        CHECK(ev.stage_energy[n] > ev.stage_claim[n]);
    }

    // Deeper stages climb inside one flat shell, where the energy has a
    // one-line closed form that doubles per level instead of halving.
    for (std::size_t n = 1; n < 5; ++n) {
        const double closed = 2.0 * kPi * M_SQRT2 * std::ldexp(1.0, int(n) - 3);
        CHECK(rel_err(ev.stage_energy[n], closed) < 1e-12);
    }

    // Stage 0 crosses a shell boundary; check it against an independent
    // Simpson sum over the same gauge rate.
    {
        const LusinLevel& l0 = c.balls.levels[0];
        const double a = std::log(l0.sigma_mid);
        const double b = c.balls.levels[0].inner.varsigma();
        const double cut = bt.vs_shell[3];
        REQUIRE(a < cut);
        REQUIRE(cut < b);
        const auto rate2 = [&](double vs) { return u_energy_rate_per_varsigma(2, vs); };
        const auto rate3 = [&](double vs) { return u_energy_rate_per_varsigma(3, vs); };
        const double mass = simpson(rate2, a, cut, 4000) + simpson(rate3, cut, b, 4000);
        CHECK(rel_err(ev.stage_energy[0], 2.0 * kPi * 4.0 * mass) < 1e-8);
    }
}

TEST_CASE("separation certificates cover the whole tree") {
    CHECK(hierarchy_disjoint(chain_five().balls));
    CHECK(hierarchy_disjoint(chain_flat().balls));
    CHECK(hierarchy_disjoint(chain_steep().balls));

    // Crowded roots overlap at level 0.
    BallHierarchy crowded = chain_five().balls;
    crowded.roots = {0.0, 0.05, 0.1, 0.15};
    CHECK_FALSE(hierarchy_disjoint(crowded));

    // Roots pushed to the edge leak out of the segment's unit ball.
    BallHierarchy leaking = chain_five().balls;
    leaking.roots = {-0.99, -0.25, 0.25, 0.99};
    CHECK_FALSE(hierarchy_disjoint(leaking));
}

TEST_CASE("shallow profiles and tiny slacks fail apart") {
    // With only two shells the slack-driven climb edge overruns the table
    // ceiling: a genuine infeasibility of the requested margin.
    CHECK_THROWS_AS(build_hierarchy(1.0, 0.25, 5, build_bump_tables(2, 2)),
                    InfeasibleError);
    CHECK_THROWS_AS(build_hierarchy(1.0, 4e-3, 5, build_bump_tables(2, 2)),
                    InfeasibleError);

    // The steep chain on three shells fails through the nesting branch
    // instead: the margin is satisfiable, the tables are just too shallow.
    CHECK_THROWS_AS(build_hierarchy(1.5, 0.25, 5, build_bump_tables(2, 3)),
                    ContractError);

    // Close to the critical exponent the admissible radius leaves double
    // range entirely.
    CHECK_THROWS_AS(build_hierarchy(1.999, 0.25, 5, tables()), InfeasibleError);

    CHECK_THROWS_AS(build_hierarchy(0.0, 0.25, 5, tables()), ContractError);
    CHECK_THROWS_AS(build_hierarchy(2.0, 0.25, 5, tables()), ContractError);
    CHECK_THROWS_AS(build_hierarchy(-1.0, 0.25, 5, tables()), ContractError);
    CHECK_THROWS_AS(build_hierarchy(1.0, 0.0, 5, tables()), ContractError);
    CHECK_THROWS_AS(build_hierarchy(1.0, 1.5, 5, tables()), ContractError);
    CHECK_THROWS_AS(build_hierarchy(1.0, 0.25, 0, tables()), ContractError);
}

TEST_CASE("catalog exposes the construction maps") {
    const MapInstance F = catalog_map("lusin_F");
    const MapInstance G = catalog_map("lusin_G");
    const MapInstance curve = catalog_map("lusin_curve");

    CHECK(F.singular_points.size() == 4);
    CHECK(curve.singular_points.size() == 4);

    // The compression map through the catalog: identity far away, the
    // radial formula inside an annulus, derivative consistent with finite
    // differences.
    {
        const Vec far = F.value(Vec{0.9, 0.3});
        CHECK(far[0] == 0.9);
        CHECK(far[1] == 0.3);

        const Vec z{0.76, 0.01};
        const double rho = std::hypot(0.01, 0.01);
        const double t = 1.0 - std::log(rho);
        const double sa = kGoldFlat.sqrt_a0;
        const Vec img = F.value(z);
        CHECK(rel_err(img[0], 0.75 + sa / (rho * t) * 0.01) < 1e-8);
        CHECK(rel_err(img[1], sa / (rho * t) * 0.01) < 1e-8);

        const Mat jac = F.jacobian(z);
        const Mat fd = fd_jacobian(F, z);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                CHECK(std::abs(jac(i, j) - fd(i, j)) < 1e-5);

        CHECK(rel_err(F.closed_form_operator_norm(z), sa / (rho * t)) < 1e-8);
        CHECK(rel_err(F.closed_form_jacobian_det(z), sa * sa / (rho * rho * t * t * t)) < 1e-8);
        CHECK(rel_err(F.closed_form_distortion(z), t) < 1e-12);

        CHECK_THROWS_AS(F.jacobian(Vec{0.75, 0.0}), EvalError);
    }

    // Distortion and pullback density along the tau axis.
    {
        const double tau_seam = -std::log(kGoldFlat.r0);
        CHECK(F.distortion_of_tau(0.5 * tau_seam) == 1.0);
        CHECK(rel_err(F.distortion_of_tau(5.0), 6.0) < 1e-15);
        CHECK(rel_err(F.log_pullback_density_of_tau(0.5 * tau_seam), -tau_seam) < 1e-12);
        const double want = 2.0 * std::log(kGoldFlat.sqrt_a0) - 3.0 * std::log(6.0);
        CHECK(rel_err(F.log_pullback_density_of_tau(5.0), want) < 1e-8);
    }

    // The climb map through the catalog: root centers and nothing else.
    {
        const Vec at_root = G.value(Vec{0.25, 0.0});
        CHECK(at_root[0] == 0.5);
        CHECK(at_root[1] == 0.5);
        const Vec off = G.value(Vec{0.3, 0.2});
        CHECK(off[0] == 0.0);
        CHECK(off[1] == 0.0);
        const Mat jac = G.jacobian(Vec{0.3, 0.2});
        CHECK(jac(0, 0) == 0.0);
        CHECK(jac(1, 1) == 0.0);
        CHECK(G.closed_form_operator_norm(Vec{0.3, 0.2}) == 0.0);
    }

    // The stacked curve carries both components over one shared build.
    {
        const Vec at_root = curve.value(Vec{0.75, 0.0});
        REQUIRE(at_root.dim() == 4);
        CHECK(at_root[0] == 0.75);
        CHECK(at_root[1] == 0.0);
        CHECK(at_root[2] == 0.5);
        CHECK(at_root[3] == -0.5);

        const Vec z{0.76, 0.01};
        const Vec top = F.value(z);
        const Vec stacked = curve.value(z);
        CHECK(stacked[0] == top[0]);
        CHECK(stacked[1] == top[1]);
        CHECK(stacked[2] == 0.0);
        CHECK(stacked[3] == 0.0);

        const Mat jc = curve.jacobian(z);
        const Mat jf = F.jacobian(z);
        REQUIRE(jc.rows == 4);
        REQUIRE(jc.cols == 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                CHECK(jc(i, j) == jf(i, j));
                CHECK(jc(i + 2, j) == 0.0);
            }

        CHECK(rel_err(curve.closed_form_operator_norm(z),
                      F.closed_form_operator_norm(z)) < 1e-15);
        CHECK(rel_err(curve.distortion_of_tau(5.0), 6.0) < 1e-15);
    }
}
