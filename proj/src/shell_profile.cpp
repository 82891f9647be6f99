#include "fdc/shell_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdc/errors.hpp"
#include "fdc/scales.hpp"

namespace fdc {

namespace {

constexpr std::size_t kNodes = 16;

struct GaussRule {
    double x[kNodes];     // nodes on [0,1]
    double logw[kNodes];  // log weights on [0,1]
};

// Gauss-Legendre by Newton iteration on the three-term recurrence.
GaussRule make_gauss() {
    GaussRule g{};
    constexpr double kPi = 3.14159265358979323846264338327950288;
    for (std::size_t i = 0; i < kNodes; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (kNodes + 0.5));
        double p1 = x, dp = 1;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1;
            p1 = x;
            for (std::size_t k = 2; k <= kNodes; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = kNodes * (x * p1 - p0) / (x * x - 1);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        const double w = 2.0 / ((1 - x * x) * dp * dp);
        g.x[i] = 0.5 * (x + 1);
        g.logw[i] = std::log(0.5 * w);
    }
    return g;
}

const GaussRule kGauss = make_gauss();

}  // namespace

ShellProfile shell_decay_profile(const std::function<double(double)>& log_integrand,
                                 const ShellSettings& settings) {
    if (!(settings.tau_start > 0) || settings.fit_window < 2 ||
        settings.shells < settings.fit_window)
        throw ContractError("shell profile: need tau_start > 0 and shells >= fit_window >= 2");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    ShellProfile prof;
    prof.settings = settings;
    prof.log_shell_mass.reserve(settings.shells);

    bool saw_nan = false, saw_inf = false;
    std::vector<double> terms(kNodes);
    for (std::size_t j = 0; j < settings.shells; ++j) {
        const double lo = settings.edge(j);
        for (std::size_t i = 0; i < kNodes; ++i) {
            const double tau = lo * (1.0 + kGauss.x[i]);
            const double li = log_integrand(tau);
            if (std::isnan(li)) saw_nan = true;
            if (li == kInf) saw_inf = true;
            terms[i] = li + kGauss.logw[i] + std::log(lo);
        }
        prof.log_shell_mass.push_back(saw_nan ? std::numeric_limits<double>::quiet_NaN()
                                              : logsumexp(terms));
        if (saw_nan || saw_inf) break;
    }
    if (saw_nan) {
        prof.verdict = ShellVerdict::Inconclusive;
        return prof;
    }
    if (saw_inf) {
        prof.verdict = ShellVerdict::Divergent;
        prof.slope = kInf;
        return prof;
    }

    std::vector<std::size_t> finite;
    for (std::size_t j = 0; j < prof.log_shell_mass.size(); ++j)
        if (std::isfinite(prof.log_shell_mass[j])) finite.push_back(j);

    if (finite.empty()) {  // identically zero integrand
        prof.verdict = ShellVerdict::Convergent;
        prof.slope = -kInf;
        return prof;
    }

    double value = 0;
    for (std::size_t j : finite) value += std::exp(prof.log_shell_mass[j]);

    if (finite.size() < 2) {
        prof.verdict = ShellVerdict::Convergent;
        prof.slope = -kInf;
        prof.value = value;
        return prof;
    }

    const std::size_t w = std::min(settings.fit_window, finite.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = finite.size() - w; k < finite.size(); ++k) {
        const double x = static_cast<double>(finite[k]);
        const double y = prof.log_shell_mass[finite[k]];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = w * sxx - sx * sx;
    prof.slope = (w * sxy - sx * sy) / denom;

    if (prof.slope >= -settings.tol_slope) {
        prof.verdict = ShellVerdict::Divergent;
        return prof;
    }
    prof.verdict = ShellVerdict::Convergent;
    const double rho = std::exp(prof.slope);
    const double tail = std::exp(prof.log_shell_mass[finite.back()]) * rho / (1 - rho);
    prof.value = value + (std::isfinite(tail) ? tail : 0.0);
    return prof;
}

}  // namespace fdc
