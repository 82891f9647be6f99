#include "fdc/forms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fdc/errors.hpp"
#include "fdc/rng.hpp"

namespace fdc {

MultiIndex MultiIndex::of(std::initializer_list<std::size_t> is) {
    if (is.size() == 0 || is.size() > 4) throw ContractError("multi-index degree must be 1..4");
    MultiIndex m;
    m.k = is.size();
    std::size_t pos = 0;
    for (std::size_t v : is) m.idx[pos++] = v;
    for (std::size_t i = 1; i < m.k; ++i)
        if (m.idx[i] <= m.idx[i - 1]) throw ContractError("multi-index must be strictly increasing");
    return m;
}

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < k; ++i) {
        if (i) os << ',';
        os << idx[i] + 1;
    }
    os << ')';
    return os.str();
}

bool VolumeForm::all_constant() const {
    for (const auto& t : terms)
        if (!t.constant) return false;
    return true;
}

double VolumeForm::coeff_at(std::size_t term, const Vec& p) const {
    const FormTerm& t = terms[term];
    return t.constant ? t.cvalue : t.coeff(p);
}

void VolumeForm::validate() const {
    if (degree == 0 || degree > 4) throw ContractError("form degree must be 1..4");
    if (degree > ambient_dim) throw ContractError("form degree exceeds ambient dimension");
    if (ambient_dim > Vec::cap) throw ContractError("ambient dimension too large");
    if (terms.empty()) throw ContractError("form has no terms");
    for (const auto& t : terms) {
        if (t.index.k != degree) throw ContractError("term degree mismatch");
        for (std::size_t i = 0; i < t.index.k; ++i)
            if (t.index.idx[i] >= ambient_dim)
                throw ContractError("term index outside ambient dimension");
        if (!t.constant && !t.coeff) throw ContractError("non-constant term without evaluator");
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i].index == terms[j].index) throw ContractError("duplicate term indices");
}

VolumeForm VolumeForm::constant(std::size_t ambient_dim,
                                std::vector<std::pair<MultiIndex, double>> cs) {
    VolumeForm w;
    w.ambient_dim = ambient_dim;
    w.degree = cs.empty() ? 0 : cs.front().first.k;
    for (auto& [mi, c] : cs) {
        FormTerm t;
        t.index = mi;
        t.constant = true;
        t.cvalue = c;
        w.terms.push_back(std::move(t));
    }
    w.declared_lower_bound = 0;
    w.validate();
    return w;
}

VolumeForm VolumeForm::area(std::size_t ambient_dim) {
    return constant(ambient_dim, {{MultiIndex::of({0, 1}), 1.0}});
}

double star_pullback(const Mat& jac, const VolumeForm& w, const Vec& image_point) {
    if (jac.rows != w.ambient_dim || jac.cols != w.degree)
        throw ContractError("star_pullback: Jacobian shape does not match the form");
    double s = 0;
    for (std::size_t t = 0; t < w.terms.size(); ++t) {
        const double c = w.coeff_at(t, image_point);
        if (c == 0.0) continue;
        s += c * rows_det(jac, w.terms[t].index.idx.data(), w.degree);
    }
    return s;
}

namespace {

// w_p applied to the columns of V; same minor kernel as the pullback.
double frame_value(const Mat& v, const VolumeForm& w, const Vec& p) {
    return star_pullback(v, w, p);
}

// Fixing every column but j, the frame value is linear in column j;
// its gradient is recovered by substituting basis vectors.
void column_gradient(Mat& v, const VolumeForm& w, const Vec& p, std::size_t j, double* g) {
    const std::size_t m = v.rows;
    std::array<double, Mat::cap> saved{};
    for (std::size_t i = 0; i < m; ++i) saved[i] = v(i, j);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < m; ++r) v(r, j) = (r == i) ? 1.0 : 0.0;
        g[i] = frame_value(v, w, p);
    }
    for (std::size_t i = 0; i < m; ++i) v(i, j) = saved[i];
}

struct AscentOutcome {
    double value = 0;
    bool hit_tol = false;
};

AscentOutcome block_ascent(Mat v, const VolumeForm& w, const Vec& p, const ComassSettings& opt) {
    const std::size_t m = v.rows, n = v.cols;
    double cur = frame_value(v, w, p);
    if (cur < 0) {
        for (std::size_t i = 0; i < m; ++i) v(i, 0) = -v(i, 0);
        cur = -cur;
    }
    AscentOutcome out;
    for (std::size_t it = 0; it < opt.max_iters; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
            std::array<double, Mat::cap> g{};
            column_gradient(v, w, p, j, g.data());
            double ng = 0;
            for (std::size_t i = 0; i < m; ++i) ng += g[i] * g[i];
            ng = std::sqrt(ng);
            if (ng > 0)
                for (std::size_t i = 0; i < m; ++i) v(i, j) = g[i] / ng;
        }
        const double next = frame_value(v, w, p);
        if (next - cur < opt.tol * std::max(1.0, std::abs(next))) {
            cur = std::max(cur, next);
            out.hit_tol = true;
            break;
        }
        cur = next;
    }
    out.value = cur;
    return out;
}

}  // namespace

ComassResult comass(const VolumeForm& w, const Vec& p, const ComassSettings& opt) {
    w.validate();
    const std::size_t m = w.ambient_dim, n = w.degree;

    if (w.terms.size() == 1) return {std::abs(w.coeff_at(0, p)), false};

    ComassResult best;
    bool best_hit_tol = false;
    auto consider = [&](const AscentOutcome& o) {
        if (o.value > best.value) {
            best.value = o.value;
            best_hit_tol = o.hit_tol;
        }
    };

    // Coordinate frames first: the frame of term I evaluates to phi_I(p)
    // exactly, which pins the result above max_I |phi_I(p)|.
    for (const auto& t : w.terms) {
        Mat v(m, n);
        for (std::size_t j = 0; j < n; ++j) v(t.index.idx[j], j) = 1.0;
        consider(block_ascent(v, w, p, opt));
    }

    Rng rng(opt.seed);
    const std::size_t random_starts =
        opt.restarts > w.terms.size() ? opt.restarts - w.terms.size() : 0;
    for (std::size_t r = 0; r < random_starts; ++r) {
        Mat v(m, n);
        for (std::size_t j = 0; j < n; ++j) {
            double norm = 0;
            for (std::size_t i = 0; i < m; ++i) {
                v(i, j) = rng.uniform(-1.0, 1.0);
                norm += v(i, j) * v(i, j);
            }
            norm = std::sqrt(norm);
            if (norm == 0) {
                v(j % m, j) = 1.0;
                norm = 1.0;
            }
            for (std::size_t i = 0; i < m; ++i) v(i, j) /= norm;
        }
        consider(block_ascent(v, w, p, opt));
    }

    best.lower_bound_only = !best_hit_tol;
    return best;
}

FormNorms form_norms(const VolumeForm& w, std::size_t sample_budget, double sample_radius,
                     std::uint64_t seed) {
    w.validate();
    FormNorms out;

    if (w.all_constant()) {
        double l1 = 0;
        for (const auto& t : w.terms) l1 += std::abs(t.cvalue);
        out.l1 = l1;
        out.inf = comass(w, Vec::zeros(w.ambient_dim)).value;
        out.estimated = false;
        return out;
    }

    Rng rng(seed);
    ComassSettings cheap;
    cheap.restarts = 16;
    double max_l1 = 0;
    double min_comass = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sample_budget; ++s) {
        Vec p = Vec::zeros(w.ambient_dim);
        for (std::size_t i = 0; i < w.ambient_dim; ++i)
            p[i] = rng.uniform(-sample_radius, sample_radius);
        double l1 = 0;
        for (std::size_t t = 0; t < w.terms.size(); ++t) {
            const double c = w.coeff_at(t, p);
            if (!std::isfinite(c) || std::abs(c) > 1e12) out.bounded = false;
            l1 += std::abs(c);
        }
        max_l1 = std::max(max_l1, l1);
        min_comass = std::min(min_comass, comass(w, p, cheap).value);
    }
    out.l1 = max_l1;
    out.inf = std::max(w.declared_lower_bound, min_comass);
    out.estimated = true;
    return out;
}

}  // namespace fdc
