#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mixsep::optim {

struct SimplexOptions {
    int max_evaluations = 2000;
    double x_tol = 1e-7;
    double f_tol = 1e-10;
    double initial_step = 0.25;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead minimization.
///
/// The starting point is always a vertex of the initial simplex, so the
/// returned value never exceeds f(x0). Non-finite objective values are
/// treated as +inf. Fully deterministic.
SimplexResult minimize(const std::function<double(std::span<const double>)>& f,
                       std::span<const double> x0, const SimplexOptions& opts = {});

}  // namespace mixsep::optim
