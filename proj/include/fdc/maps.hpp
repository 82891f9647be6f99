#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fdc/forms.hpp"
#include "fdc/linalg.hpp"
#include "fdc/smallvec.hpp"

namespace fdc {

// A map R^n -> R^m (n <= m) with evaluator, Jacobian (closed form, or the
// central-difference fallback when absent), and its known bad points.
// Instances are immutable after construction and safe to share across
// threads; evaluators must be pure.
struct MapInstance {
    std::size_t domain_dim = 2;
    std::size_t ambient_dim = 2;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian;
    std::vector<Vec> singular_points;
    std::string catalog_id;

    // Optional closed forms carried by catalog entries; empty otherwise.
    std::function<double(const Vec&)> closed_form_operator_norm;
    std::function<double(const Vec&)> closed_form_jacobian_det;
    std::function<double(const Vec&)> closed_form_distortion;

    // Radial closed forms on the tau = log(1/r) scale, usable at radii far
    // below double range; empty for maps without a radial structure.
    // The density profile is the net exponent log(J(r) r^2): pullback mass
    // per unit tau and unit angle on the log cylinder. Storing it netted
    // keeps the subdominant terms alive at huge tau, where forming
    // log J - 2 tau from a stored log J would cancel them away; log J
    // itself is recovered as the profile plus 2 tau, which only rounds.
    std::function<double(double)> distortion_of_tau;
    std::function<double(double)> log_pullback_density_of_tau;

    Vec eval(const Vec& x) const;
    Mat jac(const Vec& x) const;
};

// Central differences, step 1e-6 * max(1,|x|) by default.
Mat fd_jacobian(const MapInstance& f, const Vec& x, double step_scale = 1e-6);

struct DistortionSample {
    Vec x;
    double star = 0;             // star f* w at x
    double opnorm = 0;           // |Df(x)|
    double comass_at_image = 0;  // ||w||(f(x))
    double K = 1;
    // Cleared when star <= 0 while |Df| > 0; K is +inf there.
    bool finite_distortion = true;
};

// K is the ratio ||w||(f(x)) |Df|^n / (star f* w), floored at 1, so the
// defining inequality holds with equality by construction.  |Df| = 0
// gives K = 1.
DistortionSample distortion_at(const MapInstance& f, const VolumeForm& w, const Vec& x,
                               const ComassSettings& opt = {});

struct GridSpec {
    std::size_t max_level = 12;
    // A node is a blow-up candidate when some |minor| > threshold_base * level^2.
    double threshold_base = 10.0;
};

struct ConditionDCluster {
    Vec center;
    double peak = 0;
    MultiIndex dominant;
    std::size_t nodes = 0;
    bool single_dominant = true;
};

struct ConditionDReport {
    std::size_t crossing_level = 0;  // first level with a candidate; 0 = none
    std::vector<std::size_t> exceed_counts;  // per level, 1-based level at index level-1
    std::vector<ConditionDCluster> clusters;  // clusters at the deepest level scanned
    bool one_dominant_per_cluster = true;
};

// Heuristic evidence scan, never a proof: walks refining dyadic grids over
// the rectangle [lo,hi], flags nodes where some term minor |star f*dx_I|
// exceeds the growth schedule, and groups flagged nodes of the deepest
// level into clusters with their dominant index.
ConditionDReport condition_D_scan(const MapInstance& f, const VolumeForm& w, const Vec& lo,
                                  const Vec& hi, const GridSpec& spec = {});

}  // namespace fdc
