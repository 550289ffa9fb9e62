#pragma once

#include <functional>
#include <vector>

namespace mixsep::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod 7/15 integration over a finite interval.
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts = {});

/// Integrates f over (0, inf) after the substitution u = exp(t).
///
/// The integration bracket in t is located by probing a coarse grid augmented
/// with `hints_u` (natural-scale points near which mass may concentrate, e.g.
/// the mode of a mixing density) and widened until the integrand has decayed
/// to a negligible fraction of its peak on both sides.
Result integrate_positive_axis_log(const std::function<double(double)>& f,
                                   const std::vector<double>& hints_u = {},
                                   const Options& opts = {});

}  // namespace mixsep::quad
