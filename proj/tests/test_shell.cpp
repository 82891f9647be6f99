#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "fdc/errors.hpp"
#include "fdc/shell_profile.hpp"

using namespace fdc;

namespace {

const double kPi = 3.14159265358979323846264338327950288;
const double kE = 2.71828182845904523536028747135266250;

// Distortion profile of the paired radial-log map: K grows linearly in tau.
auto linear_profile(double lambda, double c) {
    return [lambda, c](double tau) { return lambda * (c + tau) - 2 * tau + std::log(2 * kPi); };
}

// Distortion profile of the space-curve instance: the loglog correction
// factor approaches 1 from above as tau grows.
auto curve_profile(double lambda) {
    return [lambda](double tau) {
        const double t = kE + tau;
        const double k = std::pow(1.0 / std::log(t) + 1.0, 2.0) * t;
        return lambda * k - 2 * tau + std::log(2 * kPi);
    };
}

}  // namespace

TEST_CASE("convergent mass matches the closed-form exponential integral") {
    ShellSettings s;
    const auto prof = shell_decay_profile(linear_profile(1.0, kE), s);
    REQUIRE(prof.verdict == ShellVerdict::Convergent);
    const double truth = 2 * kPi * std::exp(kE - 1.0);
    CHECK(std::abs(prof.value - truth) < 1e-10 * truth);

    ShellSettings half;
    half.tau_start = 0.5;
    const auto p2 = shell_decay_profile(linear_profile(1.0, kE), half);
    const double t2 = 2 * kPi * std::exp(kE - 0.5);
    CHECK(std::abs(p2.value - t2) < 1e-10 * t2);
}

TEST_CASE("verdicts flip exactly once across the growth-rate threshold") {
    int flips = 0;
    bool prev_divergent = false;
    bool first = true;
    for (double lambda : {1.5, 1.7, 1.9, 1.99, 2.0, 2.05, 2.2}) {
        const auto prof = shell_decay_profile(linear_profile(lambda, kE));
        REQUIRE(prof.verdict != ShellVerdict::Inconclusive);
        const bool div = prof.verdict == ShellVerdict::Divergent;
        CAPTURE(lambda);
        CHECK(div == (lambda >= 2.0));
        if (!first && div != prev_divergent) ++flips;
        prev_divergent = div;
        first = false;
    }
    CHECK(flips == 1);
}

TEST_CASE("shell masses stay finite on the linear profile") {
    const auto prof = shell_decay_profile(linear_profile(1.9, kE));
    for (double lm : prof.log_shell_mass) CHECK(std::isfinite(lm));
    CHECK(prof.settings.edge(3) == 8.0 * prof.settings.tau_start);
    CHECK(prof.settings.edge(4) > prof.settings.edge(3));
}

TEST_CASE("curve profile keeps its threshold strictly below the linear one") {
    CHECK(shell_decay_profile(curve_profile(1.95)).verdict == ShellVerdict::Convergent);
    CHECK(shell_decay_profile(curve_profile(1.995)).verdict == ShellVerdict::Divergent);
}

TEST_CASE("power-log decay sums to the closed antiderivative") {
    // Integrand (e+tau)^{-3} per unit tau: total over tau > 1 is (e+1)^{-2}/2.
    const auto prof =
        shell_decay_profile([](double tau) { return -3.0 * std::log(kE + tau); });
    REQUIRE(prof.verdict == ShellVerdict::Convergent);
    CHECK(prof.slope < -1.0);
    const double truth = 0.5 / ((kE + 1) * (kE + 1));
    CHECK(std::abs(prof.value - truth) < 1e-9 * truth);
}

TEST_CASE("degenerate and malformed inputs") {
    const auto zero = shell_decay_profile(
        [](double) { return -std::numeric_limits<double>::infinity(); });
    CHECK(zero.verdict == ShellVerdict::Convergent);
    CHECK(zero.value == 0.0);

    const auto nanprof = shell_decay_profile([](double tau) {
        return tau > 100 ? std::numeric_limits<double>::quiet_NaN() : -tau;
    });
    CHECK(nanprof.verdict == ShellVerdict::Inconclusive);

    ShellSettings bad;
    bad.shells = 3;
    bad.fit_window = 6;
    CHECK_THROWS_AS(shell_decay_profile(linear_profile(1.0, kE), bad), ContractError);
    ShellSettings neg;
    neg.tau_start = 0.0;
    CHECK_THROWS_AS(shell_decay_profile(linear_profile(1.0, kE), neg), ContractError);
}
