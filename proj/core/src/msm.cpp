#include "mixsep/msm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixsep/errors.hpp"

namespace mixsep {

namespace {

double series_std(std::span<const double> series) {
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(series.size());
    double acc = 0.0;
    for (double x : series) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(series.size()));
}

NormalMixture constant_window_fit(double value, int k, double scale) {
    return NormalMixture(std::vector<double>(k, 1.0 / k), std::vector<double>(k, value),
                         std::vector<double>(k, scale));
}

// Collapsed fits are absorbing states of warm-started EM and would freeze
// the remainder of the pass: a component whose weight reached (near) zero
// gets zero responsibilities forever after, and coincident components
// receive identical responsibilities and so can never separate again.
bool degenerate_warm_start(const NormalMixture& m) {
    for (double w : m.weights()) {
        if (w < 1e-8) return true;
    }
    const auto& a = m.locations();
    const auto& s = m.scales();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double ref = std::abs(a[i]) + std::abs(a[j]) + s[i] + s[j];
            if (std::abs(a[i] - a[j]) <= 1e-9 * ref && std::abs(s[i] - s[j]) <= 1e-9 * ref)
                return true;
        }
    }
    return false;
}

ComponentSeries forward_pass(std::span<const double> series, int window, int k,
                             const EmConfig& config) {
    const std::size_t n = series.size();
    const std::size_t m = n - window + 1;
    const double fallback_scale =
        std::max(config.scale_floor * series_std(series), std::numeric_limits<double>::min());

    ComponentSeries out;
    out.window_size = window;
    out.direction = Direction::Forward;
    out.times.reserve(m);
    out.dynamic.reserve(m);
    out.diffusive.reserve(m);
    out.mixtures.reserve(m);
    out.degenerate.reserve(m);

    std::optional<NormalMixture> warm;
    for (std::size_t p = 0; p < m; ++p) {
        const std::span<const double> win = series.subspan(p, window);
        const auto [mn, mx] = std::minmax_element(win.begin(), win.end());

        if (*mn == *mx) {
            out.mixtures.push_back(constant_window_fit(*mn, k, fallback_scale));
            out.degenerate.push_back(1);
            warm.reset();  // the placeholder would poison the next warm start
        } else {
            FitResult fit = em_fit(win, k, config, warm);
            warm = degenerate_warm_start(fit.mixture) ? std::nullopt
                                                      : std::optional(fit.mixture);
            out.mixtures.push_back(std::move(fit.mixture));
            out.degenerate.push_back(0);
        }
        const VarianceSplit split = out.mixtures.back().variance_decomposition();
        out.times.push_back(static_cast<std::int64_t>(p) + window - 1);
        out.dynamic.push_back(split.dynamic);
        out.diffusive.push_back(split.diffusive);
    }
    return out;
}

}  // namespace

std::vector<double> increments(std::span<const double> series) {
    if (series.size() < 2) throw SizeError("increments: needs at least two samples");
    std::vector<double> out(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) out[i] = series[i + 1] - series[i];
    return out;
}

ComponentSeries msm_pass(std::span<const double> series, int window, int k, const EmConfig& config,
                         Direction direction) {
    if (k < 1) throw ParameterError("msm_pass: k must be positive");
    if (window < 10 * k) throw SizeError("msm_pass: window must hold at least 10*k samples");
    if (series.size() < static_cast<std::size_t>(window))
        throw SizeError("msm_pass: series shorter than the window");

    if (direction == Direction::Forward) return forward_pass(series, window, k, config);

    std::vector<double> reversed(series.rbegin(), series.rend());
    ComponentSeries out = forward_pass(reversed, window, k, config);
    out.direction = Direction::Backward;
    std::reverse(out.dynamic.begin(), out.dynamic.end());
    std::reverse(out.diffusive.begin(), out.diffusive.end());
    std::reverse(out.mixtures.begin(), out.mixtures.end());
    std::reverse(out.degenerate.begin(), out.degenerate.end());
    // After reversal entry p covers original samples [p, p + window); its
    // trailing edge in scan order is the left one.
    for (std::size_t p = 0; p < out.times.size(); ++p) out.times[p] = static_cast<std::int64_t>(p);
    return out;
}

WeightTrack grid_msm_pass(std::span<const double> series, const Grid& grid, int window, int shift,
                          const EmConfig& config) {
    if (shift < 1) throw ParameterError("grid_msm_pass: shift must be positive");
    if (window < 10) throw SizeError("grid_msm_pass: window must hold at least 10 samples");
    if (series.size() < static_cast<std::size_t>(window))
        throw SizeError("grid_msm_pass: series shorter than the window");

    const std::size_t rows = (series.size() - window) / shift + 1;
    WeightTrack track{grid, window, shift, {}};
    track.weights.reserve(rows);

    std::vector<double> warm;
    for (std::size_t r = 0; r < rows; ++r) {
        try {
            track.weights.push_back(grid_em_fit(series.subspan(r * shift, window), grid, warm, config));
        } catch (const NumericalSupportError& e) {
            throw NumericalSupportError("grid window " + std::to_string(r) + ": " + e.what());
        }
        // Warm-start the next row with floored weights so nodes that decayed
        // to exact zero stay recoverable.
        warm = track.weights.back();
        double sum = 0.0;
        for (double& w : warm) sum += (w = std::max(w, 1e-12));
        for (double& w : warm) w /= sum;
    }
    return track;
}

}  // namespace mixsep
