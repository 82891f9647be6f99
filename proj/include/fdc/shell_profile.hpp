#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace fdc {

enum class ShellVerdict { Convergent, Divergent, Inconclusive };

struct ShellSettings {
    double tau_start = 1.0;   // first shell edge on the tau = log(1/r) scale
    std::size_t shells = 500;
    double tol_slope = 0.05;  // decay slower than this per shell reads as divergent
    std::size_t fit_window = 6;

    double edge(std::size_t j) const { return tau_start * std::ldexp(1.0, static_cast<int>(j)); }
};

// Decay record of a radial integrand over octave shells of the log-radius
// scale. Shell j spans tau in [tau_start 2^j, tau_start 2^{j+1}], so the deep
// shells probe radii with no double representation at all; every per-shell
// mass is therefore kept as a logarithm.
struct ShellProfile {
    ShellSettings settings;
    std::vector<double> log_shell_mass;
    ShellVerdict verdict = ShellVerdict::Inconclusive;
    double slope = 0;  // fitted per-shell change of log mass over the last finite window
    double value = 0;  // total mass plus a geometric tail, convergent verdicts only
};

// log_integrand maps tau to the log of the full integrand mass density per
// unit tau, angular factors included; it must accept every tau up to
// tau_start * 2^shells. A slope of the trailing log masses at or above
// -tol_slope means the shell masses have stopped decaying and the total
// diverges; anything steeper extrapolates to a convergent geometric tail.
ShellProfile shell_decay_profile(const std::function<double(double)>& log_integrand,
                                 const ShellSettings& settings = {});

}  // namespace fdc
