#pragma once

#include <string>
#include <vector>

#include "fdc/maps.hpp"

namespace fdc {

// Built-in maps, selected by id.  The radial entries all follow the same
// pattern: a profile z -> z/(|z| t(|z|)) inside the unit disk with
// t(r) = c - log r, matched to a linear map outside.  Closed-form
// Jacobians, operator norms, and distortion fields ride along so the
// sampled quantities can be checked against them.
MapInstance make_radial_log_e();        // t(r) = e - log r, z/e outside
MapInstance make_loglog_third();        // scalar loglog(e + |log|z||)
MapInstance make_radial_loglog_curve(); // the above two stacked into R^3
MapInstance make_radial_log_1();        // t(r) = 1 - log r, identity outside
MapInstance make_affine(const Mat& a, const Vec& b);
MapInstance make_orlicz_bump(std::size_t bump_depth = 12);  // scalar shell profile u(|z|)
MapInstance make_lusin_F(double lambda, double eps, std::size_t depth,
                         std::size_t bump_depth);  // nested ball compression, plane to plane
MapInstance make_lusin_G(double lambda, double eps, std::size_t depth,
                         std::size_t bump_depth);  // square-center climb, plane to plane
MapInstance make_lusin_curve(double lambda, double eps, std::size_t depth,
                             std::size_t bump_depth);  // both stacked into R^4

struct CatalogParams {
    double lambda = 1.0;      // exponential-distortion exponent of the nested construction
    double eps = 0.25;        // distortion margin of the nested construction
    std::size_t depth = 5;    // nesting levels
    std::size_t bump_depth = 12;  // shells of the radial bump
    Mat affine_a = Mat::identity(2);
    Vec affine_b = Vec::zeros(2);
};

// Throws ContractError for unknown ids or out-of-range parameters.
MapInstance catalog_map(const std::string& id, const CatalogParams& params = {});

std::vector<std::string> catalog_ids();

}  // namespace fdc
