#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fdc/bump.hpp"
#include "fdc/scales.hpp"
#include "fdc/smallvec.hpp"

namespace fdc {

// Nested ball family on the segment [-1,1] x {0} together with the dyadic
// square family it is wired to.  F compresses each ball annulus so hard
// that the segment's image gains a full dimension of oscillation room, and
// G climbs from each square center to its four children across annuli whose
// inner radii sit far below double range.  All deep radii are TierRadius
// values; the raw plane only ever sees the level-0 annuli.

struct LusinLevel {
    std::size_t count = 0;   // balls at this level: 4^(n+1)
    double cap = 0;          // admissible ceiling for the outer radius
    TierRadius outer;        // ball radius R_n
    TierRadius mid;          // outer edge of the climb zone
    TierRadius inner;        // frozen core radius r_n
    double sqrt_scale = 0;   // linear compression accumulated through this level
    double sigma_mid = 0;    // sigma scale at the climb edge
    double u_mid = 0;        // profile height at the climb edge
    double u_inner = 0;      // profile height at the core radius
    double span = 0;         // u_inner - u_mid; also the square center step above
};

struct BallHierarchy {
    double lambda = 1.0;
    double eps = 0.25;
    std::size_t depth = 5;        // levels 0..depth-1
    std::vector<double> roots;    // level-0 center abscissae on the segment
    std::vector<LusinLevel> levels;

    // Child centers sit at these multiples of the parent core radius along
    // the segment direction (the parent of level 0 is the segment itself,
    // with unit half-length).
    static constexpr double kChildOffset[4] = {-0.75, -0.25, 0.25, 0.75};
};

struct SquareHierarchy {
    std::size_t depth = 5;
    std::vector<std::vector<Vec>> centers;  // centers[n][i], 4^(n+1) per level

    // Distance from a level-(n+1) center to its parent center; step(-1) is
    // the distance from the level-0 centers to the origin.
    static double step(int n) { return M_SQRT2 * std::ldexp(1.0, -n - 2); }
};

struct LusinConstruction {
    BallHierarchy balls;
    SquareHierarchy squares;
};

// Builds both families to the requested depth over the given gradient
// profile.  Levels after the first nest by a fixed factor 8; the climb
// edge of each level is pushed deep enough that the climb gradient stays
// below eps times the stretch of the ball map.  Throws ContractError when
// the profile tables cannot hold the nesting chain and InfeasibleError
// when eps alone forces radii past the table floor.
LusinConstruction build_hierarchy(double lambda, double eps, std::size_t depth,
                                  const BumpTables& bump);

// Pairwise separation at every level: explicit distances at level 0,
// ratio and sigma-gap certificates below double range.
bool hierarchy_disjoint(const BallHierarchy& h);

// The ball map at a raw point.  Only the level-0 stage is visible to
// doubles: deeper stages move radii that no raw offset can reach.  Ball
// centers are fixed points of every stage.
Vec eval_F(const BallHierarchy& h, const Vec& z);

// The climb map at a raw point: zero away from the ball centers, the
// matching level-0 square center exactly at them.  The first climb zone
// starts at radii far below the subnormal range, so no other raw point
// sees a nonzero value.
Vec eval_G(const LusinConstruction& c, const Vec& z);

// Value at the center of ball (level, index), certified by the build-time
// separation checks: stages below the ball's own level cannot reach its
// center.
Vec eval_G_center(const LusinConstruction& c, std::size_t level, std::size_t index);

// Value at a structural point: the center of ball (level, index) displaced
// outward by rho, with r_n <= rho <= R_n.  Inside the climb zone the value
// interpolates along the segment from the parent square center; outside it
// the previous stage value stands.
Vec eval_G_annulus(const LusinConstruction& c, const BumpTables& bump,
                   std::size_t level, std::size_t index, const TierRadius& rho);

// log K and log(J rho^2) of the composed ball map on a level annulus at
// local radius rho.  The net density form stays finite at depths where J
// and rho^2 separately have no double representation.
double annulus_log_distortion(const TierRadius& rho);
double annulus_log_density_net(const BallHierarchy& h, std::size_t level,
                               const TierRadius& rho);

// log |DG| - log sqrt(K J) at a structural annulus point of the given
// level.  The build keeps this at or below log(eps) throughout every
// climb zone; the check is exact on the sigma scale at any depth.
double dg_margin_log(const BumpTables& bump, const BallHierarchy& h,
                     std::size_t level, const TierRadius& rho);

struct LevelExpIntegral {
    double closed_form = 0;
    double quadrature = 0;
    double quad_error = 0;
    // Levels whose annuli lie below double range integrate to an honest
    // zero on both routes; the flag records that the quadrature had
    // nothing representable to sample.
    bool quadrature_meaningful = false;
};

// Mass of exp(lambda (1 - log |z - c|)) over the level's annuli: the
// closed antiderivative, and an adaptive quadrature with a geometric
// shell tail for comparison where the annulus is raw-representable.
LevelExpIntegral level_exp_integral(const BallHierarchy& h, double lambda,
                                    std::size_t level);

struct LusinEvidence {
    std::size_t expected_centers = 0;  // square centers across all built levels
    std::size_t attained_centers = 0;  // reached exactly by the climb map
    std::vector<double> step_sup;      // measured sup of one climb stage per level
    std::vector<double> step_claim;    // the halved pattern it is compared against
    std::vector<double> stage_energy;  // energy-gauge mass of each climb stage
    std::vector<double> stage_claim;   // the halving pattern 2^-(n+1)
    bool segment_preserved = false;    // F keeps the segment inside itself
    std::size_t axis_samples = 0;
    double worst_axis_drift = 0;       // largest |y| of F over the sampled segment
};

// Samples the construction and reports what it actually attains: center
// attainment counts, per-stage sup steps and energies next to the halved
// patterns they are usually compared against, and segment preservation.
// The sup steps land at twice the halved pattern and the stage energies
// exceed it; both are reported as measured.
LusinEvidence lusin_evidence(const LusinConstruction& c, const BumpTables& bump,
                             std::size_t radial_samples = 256,
                             std::size_t axis_samples = 2048);

}  // namespace fdc
