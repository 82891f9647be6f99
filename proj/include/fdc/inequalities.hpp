#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace fdc {

// Where a constant in an inequality came from: read off the written proof,
// or obtained by maximizing the deficit over the branch domain on a refined
// grid and widening by a 5% safety factor.
enum class ConstantProvenance { FormulaFromProof, NumericallyDerivedSup };

// One product-splitting inequality with its parameters and the two
// right-hand constants.  Three shapes are supported:
//   lemma-2.4        xy log^a(C (xy)^{1/n}) <= (C/b) x log^{a+1}(x^{1/n}) + c2 e^{by}
//   lemma-2.5        xy log^a(e+(xy)^{1/n}) <= (c1/b) x log^{a+1}(e+x^{1/n}) + c2 e^{by}
//   thm-1.4-product  ab <= exp(kappa a) + (2b/kappa) log(e+b/kappa)
// The first two hold for x, y >= 1, a > -1, b > 0; the third for a >= 1,
// b >= 0, kappa > 0.  The unknown constant C in the first shape is pinned
// to e, which keeps the logarithm positive on the whole domain even for
// negative a.  The written first constant of the second shape thins out as
// a approaches -1 and stops covering its branch below roughly a = -0.8;
// the checker reports such parameter choices with honest witnesses instead
// of padding the constant.
struct InequalitySpec {
    std::string name;  // lemma-2.4 | lemma-2.5 | thm-1.4-product
    std::size_t n = 2;
    double a = 0;
    double b = 1;
    double kappa = 1;
    double c1 = 0;
    double c2 = 0;
    ConstantProvenance c1_provenance = ConstantProvenance::FormulaFromProof;
    ConstantProvenance c2_provenance = ConstantProvenance::FormulaFromProof;

    // Throws ContractError when the name is unknown or a parameter leaves
    // the inequality's stated range.
    void validate() const;
};

InequalitySpec lemma24_spec(std::size_t n, double a, double b);
InequalitySpec lemma25_spec(std::size_t n, double a, double b);
InequalitySpec product_spec(double kappa);

struct ViolationReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    // Largest sampled LHS/RHS ratio; at most 1 when the inequality holds.
    double max_ratio = 0;
    double worst_x = 0;  // the product shape reports (a, b) here
    double worst_y = 0;
};

// Draws `samples` log-uniform points from the documented sampling box
// ([1,10^6]^2 for the lemma shapes, [1,50] x [0,10^6] for the product
// shape, the latter with an atom at b = 0) and compares both sides in log
// scale, so e^{by} never has to be formed.  Deterministic in `seed`.
ViolationReport run_check(const InequalitySpec& spec, std::size_t samples, std::uint64_t seed);

ViolationReport check_lemma24(std::size_t n, double a, double b, std::size_t samples,
                              std::uint64_t seed = 1);
ViolationReport check_lemma25(std::size_t n, double a, double b, std::size_t samples,
                              std::uint64_t seed = 1);
ViolationReport check_product_inequality(double kappa, std::size_t samples,
                                         std::uint64_t seed = 1);

}  // namespace fdc
