#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fdc/linalg.hpp"
#include "fdc/smallvec.hpp"

namespace fdc {

// Strictly increasing tuple of 0-based ambient coordinate indices.
// Degree is capped at 4, the largest minor the determinant kernel handles.
struct MultiIndex {
    std::array<std::size_t, 4> idx{};
    std::size_t k = 0;

    static MultiIndex of(std::initializer_list<std::size_t> is);

    bool operator==(const MultiIndex& o) const {
        if (k != o.k) return false;
        for (std::size_t i = 0; i < k; ++i)
            if (idx[i] != o.idx[i]) return false;
        return true;
    }

    // 1-based display form, e.g. "(1,2)".
    std::string str() const;
};

struct FormTerm {
    MultiIndex index;
    std::function<double(const Vec&)> coeff;
    bool constant = true;
    double cvalue = 0;  // meaningful only when constant
};

// n-covector field on R^m written in coordinates: sum of phi_I dx_I.
struct VolumeForm {
    std::size_t degree = 2;
    std::size_t ambient_dim = 2;
    std::vector<FormTerm> terms;
    // For non-constant coefficient forms: the promised c with ||w||(p) > c.
    double declared_lower_bound = 0;

    bool all_constant() const;
    double coeff_at(std::size_t term, const Vec& p) const;

    // Throws ContractError on duplicate indices, empty term list,
    // degree out of range, or index entries outside the ambient dimension.
    void validate() const;

    static VolumeForm constant(std::size_t ambient_dim,
                               std::vector<std::pair<MultiIndex, double>> cs);
    // dx1^dx2 embedded in R^m.
    static VolumeForm area(std::size_t ambient_dim = 2);
};

// sum_I phi_I(p) det(rows I of J).  J is m x n; the rows are selected by
// each term's ambient indices.  With J = Df(x) and p = f(x) this is the
// coordinate of the pulled-back form against the domain volume.
double star_pullback(const Mat& jac, const VolumeForm& w, const Vec& image_point);

struct MapInstance;
double star_pullback(const MapInstance& f, const VolumeForm& w, const Vec& x);

struct ComassSettings {
    std::size_t restarts = 64;
    double tol = 1e-8;
    std::size_t max_iters = 200;
    std::uint64_t seed = 424242;
};

struct ComassResult {
    double value = 0;
    // Set when the ascent budget ran out; the value is then only a lower bound.
    bool lower_bound_only = false;
};

// sup |w_p(v_1,...,v_n)| over n-tuples of vectors with |v_i| <= 1.
// Single-term forms are exact; otherwise multi-start block ascent seeded
// with every term's coordinate frame, so the result is never below
// max_I |phi_I(p)|.
ComassResult comass(const VolumeForm& w, const Vec& p, const ComassSettings& opt = {});

struct FormNorms {
    double l1 = 0;   // sup_p sum_I |phi_I(p)|
    double inf = 0;  // inf_p ||w||(p)
    bool estimated = false;
    bool bounded = true;
};

// Exact for constant coefficients.  Otherwise estimated by sampling the
// cube [-sample_radius, sample_radius]^m; inf is floored at the form's
// declared lower bound and the result carries the estimated flag.
FormNorms form_norms(const VolumeForm& w, std::size_t sample_budget = 512,
                     double sample_radius = 1.0, std::uint64_t seed = 99);

}  // namespace fdc
