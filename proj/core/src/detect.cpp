#include "mixsep/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "mixsep/errors.hpp"
#include "mixsep/special.hpp"

namespace mixsep {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::size_t> run_starts(const std::vector<std::size_t>& marked) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < marked.size(); ++i)
        if (i == 0 || marked[i] != marked[i - 1] + 1) starts.push_back(marked[i]);
    return starts;
}

double chi_pvalue_with_cuts(std::span<const double> sample, const NormalMixture& fitted, int bins,
                            std::vector<double>* warm_cuts) {
    if (bins < 2) throw ParameterError("chi_square_pvalue: needs at least two bins");
    if (sample.size() < static_cast<std::size_t>(5 * bins))
        throw SizeError("chi_square_pvalue: needs at least 5 points per bin");

    std::vector<double> cuts(bins - 1);
    for (int b = 1; b < bins; ++b) {
        const double hint = (warm_cuts && warm_cuts->size() == cuts.size())
                                ? (*warm_cuts)[b - 1]
                                : std::numeric_limits<double>::quiet_NaN();
        cuts[b - 1] = fitted.quantile(static_cast<double>(b) / bins, hint);
    }
    if (warm_cuts) *warm_cuts = cuts;

    std::vector<double> counts(bins, 0.0);
    for (double x : sample) {
        const std::size_t b = static_cast<std::size_t>(
            std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
        counts[b] += 1.0;
    }
    const double expected = static_cast<double>(sample.size()) / bins;
    double stat = 0.0;
    for (double c : counts) stat += (c - expected) * (c - expected) / expected;
    return special::chi_square_sf(stat, bins - 1);
}

}  // namespace

Bounds calibrate_bounds(std::span<const double> rest_values, double q_low, double q_high) {
    if (!(q_low > 0.0 && q_low < q_high && q_high < 1.0))
        throw ParameterError("calibrate_bounds: need 0 < q_low < q_high < 1");
    if (rest_values.size() < 100)
        throw CalibrationError("calibrate_bounds: needs at least 100 rest values");
    std::vector<double> sorted(rest_values.begin(), rest_values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        throw CalibrationError("calibrate_bounds: rest segment is constant");
    return {sorted_quantile(sorted, q_low), sorted_quantile(sorted, q_high)};
}

std::vector<std::int64_t> threshold_crossings(const ComponentSeries& component,
                                              const Bounds& bounds) {
    if (!(bounds.lower <= bounds.upper)) throw ParameterError("threshold_crossings: empty band");
    if (component.dynamic.size() != component.times.size())
        throw ValidationError("threshold_crossings: malformed component series");

    std::vector<std::int64_t> out;
    bool inside = true;
    for (std::size_t p = 0; p < component.dynamic.size(); ++p) {
        const double v = component.dynamic[p];
        const bool now_inside = v >= bounds.lower && v <= bounds.upper;
        if (p > 0 && inside && !now_inside) out.push_back(component.times[p]);
        inside = now_inside;
    }
    return out;
}

EventList group_candidates(std::span<const std::int64_t> points, int window, int j) {
    if (window < 1 || j < 1) throw ParameterError("group_candidates: window and j must be positive");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i] < points[i - 1])
            throw ValidationError("group_candidates: points must be sorted ascending");

    EventList out;
    const std::int64_t merge_gap = static_cast<std::int64_t>(j) * window;
    std::size_t i = 0;
    while (i < points.size()) {
        std::size_t end = i + 1;
        while (end < points.size() && points[end] - points[end - 1] < merge_gap) ++end;
        const double mean = std::accumulate(points.begin() + i, points.begin() + end, 0.0) /
                            static_cast<double>(end - i);
        out.times_ms.push_back(mean);
        i = end;
    }
    return out;
}

EventList reconcile_fwd_bwd(const EventList& fwd, const EventList& bwd, double tolerance_ms) {
    if (!(tolerance_ms >= 0.0)) throw ParameterError("reconcile_fwd_bwd: negative tolerance");

    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t f = 0; f < fwd.times_ms.size(); ++f)
        for (std::size_t b = 0; b < bwd.times_ms.size(); ++b) {
            const double dist = std::fabs(fwd.times_ms[f] - bwd.times_ms[b]);
            if (dist <= tolerance_ms) candidates.emplace_back(dist, f, b);
        }
    std::sort(candidates.begin(), candidates.end());

    std::vector<bool> used_f(fwd.times_ms.size(), false), used_b(bwd.times_ms.size(), false);
    EventList out;
    out.detector = fwd.detector;
    for (const auto& [dist, f, b] : candidates) {
        if (used_f[f] || used_b[b]) continue;
        used_f[f] = used_b[b] = true;
        out.times_ms.push_back(0.5 * (fwd.times_ms[f] + bwd.times_ms[b]));
    }
    std::sort(out.times_ms.begin(), out.times_ms.end());
    out.times_ms.erase(std::unique(out.times_ms.begin(), out.times_ms.end()), out.times_ms.end());
    return out;
}

std::vector<double> z_distance_series(const WeightTrack& track, int lag) {
    if (lag < 1) throw ParameterError("z_distance_series: lag must be positive");
    const std::size_t rows = track.weights.size();
    if (static_cast<std::size_t>(lag) >= rows)
        throw SizeError("z_distance_series: track has no row pairs this far apart");

    std::vector<double> out(rows - lag);
    for (std::size_t i = lag; i < rows; ++i) {
        const auto& now = track.weights[i];
        const auto& then = track.weights[i - lag];
        double acc = 0.0;
        for (std::size_t c = 0; c < now.size(); ++c)
            acc += (now[c] - then[c]) * (now[c] - then[c]);
        out[i - lag] = std::sqrt(acc);
    }
    return out;
}

EventList z_detector(std::span<const double> z, const DetectorParams& params,
                     double sampling_rate_hz) {
    if (!(sampling_rate_hz > 0.0)) throw ParameterError("z_detector: bad sampling rate");

    std::vector<std::size_t> marked;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] > params.z_threshold) marked.push_back(i);

    EventList out;
    out.detector = "zdist";
    std::int64_t last_kept = std::numeric_limits<std::int64_t>::min() / 2;
    for (std::size_t start : run_starts(marked)) {
        const std::int64_t s = static_cast<std::int64_t>(start);
        if (s - last_kept <= params.reflection_window) continue;
        last_kept = s;
        out.times_ms.push_back(static_cast<double>(s + params.z_lag) * 1000.0 / sampling_rate_hz +
                               params.z_shift_ms);
    }
    return out;
}

double chi_square_pvalue(std::span<const double> sample, const NormalMixture& fitted, int bins) {
    return chi_pvalue_with_cuts(sample, fitted, bins, nullptr);
}

EventList stability_detector(const WeightTrack& track, std::span<const double> series,
                             const DetectorParams& params, double sampling_rate_hz) {
    if (!(sampling_rate_hz > 0.0)) throw ParameterError("stability_detector: bad sampling rate");
    const std::size_t rows = track.weights.size();
    if (rows == 0) throw SizeError("stability_detector: empty track");
    if ((rows - 1) * track.shift + track.window_size > series.size())
        throw ValidationError("stability_detector: track does not align with the series");

    std::vector<std::size_t> marked;
    std::vector<double> warm_cuts;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto window = series.subspan(r * track.shift, track.window_size);
        const NormalMixture fitted = track.grid.mixture(track.weights[r]);
        const double p = chi_pvalue_with_cuts(window, fitted, params.chi_bins, &warm_cuts);
        if (p > params.chi_p_threshold) marked.push_back(r);
    }

    const double row_ms = track.shift * 1000.0 / sampling_rate_hz;
    EventList out;
    out.detector = "chisq";
    std::size_t i = 0;
    while (i < marked.size()) {
        std::size_t end = i + 1;
        while (end < marked.size() && marked[end] == marked[end - 1] + 1) ++end;
        const double duration_ms = static_cast<double>(end - i) * row_ms;
        if (duration_ms >= params.chi_min_group_ms)
            out.times_ms.push_back(static_cast<double>(marked[i]) * row_ms + params.chi_shift_ms);
        i = end;
    }
    return out;
}

EventList alpha_detector(std::span<const double> alpha_series, const DetectorParams& params,
                         double sampling_rate_hz) {
    if (!(sampling_rate_hz > 0.0)) throw ParameterError("alpha_detector: bad sampling rate");
    const std::size_t w = static_cast<std::size_t>(params.alpha_avg_window);
    if (params.alpha_avg_window < 1)
        throw ParameterError("alpha_detector: averaging window must be positive");

    std::vector<std::size_t> marked;
    if (alpha_series.size() >= w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < alpha_series.size(); ++i) {
            acc += std::fabs(alpha_series[i]);
            if (i >= w) acc -= std::fabs(alpha_series[i - w]);
            if (i + 1 >= w && acc / static_cast<double>(w) > params.alpha_threshold)
                marked.push_back(i);
        }
    }

    EventList out;
    out.detector = "alpha";
    for (std::size_t start : run_starts(marked))
        out.times_ms.push_back(static_cast<double>(start) * 1000.0 / sampling_rate_hz -
                               params.alpha_shift_ms);
    return out;
}

EventList window_variance_detector(std::span<const double> myogram, double width_ms,
                                   double threshold, double sampling_rate_hz) {
    if (!(sampling_rate_hz > 0.0)) throw ParameterError("window_variance_detector: bad sampling rate");
    if (!(width_ms >= 30.0 && width_ms <= 50.0))
        throw ParameterError("window_variance_detector: width must lie in [30, 50] ms");
    if (!std::isfinite(threshold) || threshold < 0.0)
        throw ParameterError("window_variance_detector: bad threshold");
    const std::size_t w =
        static_cast<std::size_t>(std::llround(width_ms * sampling_rate_hz / 1000.0));
    if (w < 2) throw ParameterError("window_variance_detector: width below two samples");
    if (myogram.size() < w) throw SizeError("window_variance_detector: series shorter than width");

    std::vector<double> variance(myogram.size() - w + 1);
    for (std::size_t i = 0; i < variance.size(); ++i) {
        double mean = 0.0;
        for (std::size_t t = i; t < i + w; ++t) mean += myogram[t];
        mean /= static_cast<double>(w);
        double acc = 0.0;
        for (std::size_t t = i; t < i + w; ++t) acc += (myogram[t] - mean) * (myogram[t] - mean);
        variance[i] = acc / static_cast<double>(w - 1);
    }

    std::vector<std::int64_t> crossings;
    for (std::size_t i = 1; i < variance.size(); ++i)
        if (variance[i - 1] <= threshold && variance[i] > threshold)
            crossings.push_back(static_cast<std::int64_t>(i + w - 1));

    EventList grouped = group_candidates(crossings, static_cast<int>(w), 2);
    EventList out;
    out.detector = "winvar";
    for (double t : grouped.times_ms) out.times_ms.push_back(t * 1000.0 / sampling_rate_hz);
    return out;
}

MatchReport match_events(const EventList& detected, const EventList& actual, double tolerance_ms) {
    if (!(tolerance_ms >= 0.0)) throw ParameterError("match_events: negative tolerance");

    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t d = 0; d < detected.times_ms.size(); ++d)
        for (std::size_t a = 0; a < actual.times_ms.size(); ++a) {
            const double dist = std::fabs(detected.times_ms[d] - actual.times_ms[a]);
            if (dist <= tolerance_ms) candidates.emplace_back(dist, d, a);
        }
    std::sort(candidates.begin(), candidates.end());

    std::vector<bool> used_d(detected.times_ms.size(), false), used_a(actual.times_ms.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    for (const auto& [dist, d, a] : candidates) {
        if (used_d[d] || used_a[a]) continue;
        used_d[d] = used_a[a] = true;
        chosen.emplace_back(d, a);
    }
    std::sort(chosen.begin(), chosen.end());

    MatchReport report;
    double abs_acc = 0.0;
    for (const auto& [d, a] : chosen) {
        report.pairs.emplace_back(detected.times_ms[d], actual.times_ms[a]);
        abs_acc += std::fabs(detected.times_ms[d] - actual.times_ms[a]);
    }
    for (std::size_t d = 0; d < used_d.size(); ++d)
        if (!used_d[d]) report.false_positives.push_back(detected.times_ms[d]);
    for (std::size_t a = 0; a < used_a.size(); ++a)
        if (!used_a[a]) report.misses.push_back(actual.times_ms[a]);
    report.mean_abs_error_ms = report.pairs.empty() ? 0.0 : abs_acc / report.pairs.size();
    return report;
}

}  // namespace mixsep
