#include "mixsep/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixsep/errors.hpp"

namespace mixsep::optim {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

SimplexResult minimize(const std::function<double(std::span<const double>)>& f,
                       std::span<const double> x0, const SimplexOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw ParameterError("minimize: empty start point");

    int evaluations = 0;
    const auto eval = [&](const std::vector<double>& x) {
        ++evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> verts(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (std::size_t i = 0; i < n; ++i)
        verts[i + 1][i] += opts.initial_step * std::max(std::fabs(x0[i]), 1.0);
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fvals[i] = eval(verts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;

    while (evaluations < opts.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double spread_x = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread_x = std::max(spread_x, std::fabs(verts[worst][i] - verts[best][i]));
        const double spread_f = fvals[worst] - fvals[best];
        if (spread_x <= opts.x_tol && std::isfinite(spread_f) && spread_f <= opts.f_tol) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += verts[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i)
            trial[i] = centroid[i] + kReflect * (centroid[i] - verts[worst][i]);
        const double f_reflect = eval(trial);

        if (f_reflect < fvals[best]) {
            for (std::size_t i = 0; i < n; ++i)
                trial2[i] = centroid[i] + kExpand * (trial[i] - centroid[i]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                verts[worst] = trial2;
                fvals[worst] = f_expand;
            } else {
                verts[worst] = trial;
                fvals[worst] = f_reflect;
            }
        } else if (f_reflect < fvals[second]) {
            verts[worst] = trial;
            fvals[worst] = f_reflect;
        } else {
            const bool outside = f_reflect < fvals[worst];
            const auto& base = outside ? trial : verts[worst];
            for (std::size_t i = 0; i < n; ++i)
                trial2[i] = centroid[i] + kContract * (base[i] - centroid[i]);
            const double f_contract = eval(trial2);
            if (f_contract < std::min(f_reflect, fvals[worst])) {
                verts[worst] = trial2;
                fvals[worst] = f_contract;
            } else {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        verts[k][i] = verts[best][i] + kShrink * (verts[k][i] - verts[best][i]);
                    fvals[k] = eval(verts[k]);
                    if (evaluations >= opts.max_evaluations) break;
                }
            }
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fvals.begin(), fvals.end()) - fvals.begin());
    return {verts[best], fvals[best], evaluations, converged};
}

}  // namespace mixsep::optim
