#include "mixsep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>

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

double sorted_quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

// Calibration bounds of one pass: dynamic values of the windows lying fully
// inside the rest segment.
std::vector<double> rest_dynamic(const ComponentSeries& series, std::size_t n_increments,
                                 const PipelineConfig& cfg) {
    const double per_ms = cfg.sampling_rate_hz / 1000.0;
    const auto start =
        static_cast<std::int64_t>(std::llround(cfg.calibration_start_ms * per_ms));
    const auto end_sample = static_cast<std::int64_t>(std::llround(cfg.calibration_end_ms * per_ms));
    const std::int64_t end_inc = std::min<std::int64_t>(end_sample - 1, n_increments);
    const int w = series.window_size;

    std::vector<double> values;
    for (std::int64_t p = std::max<std::int64_t>(start, 0);
         p + w <= end_inc && p < static_cast<std::int64_t>(series.dynamic.size()); ++p)
        values.push_back(series.dynamic[p]);
    if (values.empty())
        throw CalibrationError("calibration segment holds no complete windows");
    return values;
}

EventList to_ms(const EventList& in, double sampling_rate_hz, const std::string& label) {
    EventList out;
    out.detector = label;
    for (double t : in.times_ms) out.times_ms.push_back(t * 1000.0 / sampling_rate_hz);
    return out;
}

}  // namespace

Decomposition decompose(std::span<const double> myogram, const PipelineConfig& cfg) {
    const std::vector<double> incr = increments(myogram);
    auto backward = std::async(std::launch::async, [&] {
        return msm_pass(incr, cfg.msm_window, cfg.msm_k, cfg.em, Direction::Backward);
    });
    ComponentSeries forward = msm_pass(incr, cfg.msm_window, cfg.msm_k, cfg.em, Direction::Forward);
    return {std::move(forward), backward.get()};
}

Grid build_grid(std::span<const double> values, const PipelineConfig& cfg) {
    if (values.size() < 2) throw SizeError("build_grid: needs at least two values");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    if (*mn == *mx) throw DegenerateDataError("build_grid: values are constant");
    if (cfg.grid_locations < 2) throw ParameterError("build_grid: needs at least two locations");

    const double spacing = (*mx - *mn) / static_cast<double>(cfg.grid_locations - 1);
    const double reference =
        cfg.grid_scale_reference == GridScaleReference::NodeSpacing ? spacing : series_std(values);
    std::vector<double> scales;
    for (double f : cfg.grid_scale_factors) {
        if (!(f > 0.0)) throw ParameterError("build_grid: scale factors must be positive");
        scales.push_back(f * reference);
    }
    return Grid::regular(*mn, *mx, cfg.grid_locations, scales);
}

GridAnalysis grid_analysis(std::span<const double> myogram, const PipelineConfig& cfg) {
    const std::vector<double> incr = increments(myogram);
    ComponentSeries forward =
        msm_pass(incr, cfg.msm_window, cfg.msm_k, cfg.em, Direction::Forward);
    std::vector<double> dynamic = std::move(forward.dynamic);
    WeightTrack track = grid_msm_pass(dynamic, build_grid(dynamic, cfg), cfg.grid_window,
                                      cfg.grid_shift, cfg.em);
    return {std::move(dynamic), std::move(track)};
}

EventList detect_msm(std::span<const double> myogram, const PipelineConfig& cfg) {
    const std::vector<double> incr = increments(myogram);
    auto backward_task = std::async(std::launch::async, [&] {
        return msm_pass(incr, cfg.msm_window, cfg.msm_k, cfg.em, Direction::Backward);
    });
    const ComponentSeries forward =
        msm_pass(incr, cfg.msm_window, cfg.msm_k, cfg.em, Direction::Forward);
    const ComponentSeries backward = backward_task.get();

    const Bounds bounds_f = calibrate_bounds(rest_dynamic(forward, incr.size(), cfg),
                                             cfg.bound_q_low, cfg.bound_q_high);
    const Bounds bounds_b = calibrate_bounds(rest_dynamic(backward, incr.size(), cfg),
                                             cfg.bound_q_low, cfg.bound_q_high);

    const auto crossings_f = threshold_crossings(forward, bounds_f);
    const auto crossings_b = threshold_crossings(backward, bounds_b);
    const EventList grouped_f =
        group_candidates(crossings_f, cfg.msm_window, cfg.detectors.group_factor_j);
    const EventList grouped_b =
        group_candidates(crossings_b, cfg.msm_window, cfg.detectors.group_factor_j);

    return reconcile_fwd_bwd(to_ms(grouped_f, cfg.sampling_rate_hz, "msm"),
                             to_ms(grouped_b, cfg.sampling_rate_hz, "msm"),
                             cfg.reconcile_tolerance_ms);
}

EventList detect_zdist(const GridAnalysis& analysis, const PipelineConfig& cfg) {
    const std::vector<double> z = z_distance_series(analysis.track, cfg.detectors.z_lag);
    // Row index times shift converts to samples; feeding a scaled rate keeps
    // z_detector's row arithmetic valid for any shift.
    return z_detector(z, cfg.detectors, cfg.sampling_rate_hz / analysis.track.shift);
}

EventList detect_chisq(const GridAnalysis& analysis, const PipelineConfig& cfg) {
    return stability_detector(analysis.track, analysis.dynamic, cfg.detectors,
                              cfg.sampling_rate_hz);
}

EventList detect_alpha(std::span<const double> myogram, const PipelineConfig& cfg) {
    const AlphaTrack track =
        alpha_track(myogram, cfg.alpha_window, cfg.alpha_shift, cfg.alpha_family, cfg.alpha_fit);
    return alpha_detector(track.alpha, cfg.detectors, cfg.sampling_rate_hz / track.shift);
}

EventList detect_winvar(std::span<const double> myogram, const PipelineConfig& cfg) {
    double threshold;
    if (cfg.winvar_threshold) {
        threshold = *cfg.winvar_threshold;
    } else {
        const double per_ms = cfg.sampling_rate_hz / 1000.0;
        const auto start = static_cast<std::size_t>(
            std::max<std::int64_t>(0, std::llround(cfg.calibration_start_ms * per_ms)));
        const auto end = std::min(myogram.size(), static_cast<std::size_t>(std::max<std::int64_t>(
                                                      0, std::llround(cfg.calibration_end_ms * per_ms))));
        const auto w =
            static_cast<std::size_t>(std::llround(cfg.winvar_width_ms * per_ms));
        if (end <= start || end - start < w + 100)
            throw CalibrationError("detect_winvar: calibration segment too short");

        std::vector<double> variances;
        for (std::size_t i = start; i + w <= end; ++i) {
            double mean = 0.0;
            for (std::size_t t = i; t < i + w; ++t) mean += myogram[t];
            mean /= static_cast<double>(w);
            double acc = 0.0;
            for (std::size_t t = i; t < i + w; ++t)
                acc += (myogram[t] - mean) * (myogram[t] - mean);
            variances.push_back(acc / static_cast<double>(w - 1));
        }
        threshold = 3.0 * sorted_quantile(std::move(variances), 0.999);
    }
    return window_variance_detector(myogram, cfg.winvar_width_ms, threshold, cfg.sampling_rate_hz);
}

EventList run_detector(std::span<const double> myogram, DetectMethod method,
                       const PipelineConfig& cfg) {
    switch (method) {
        case DetectMethod::Msm:
            return detect_msm(myogram, cfg);
        case DetectMethod::ZDistance:
            return detect_zdist(grid_analysis(myogram, cfg), cfg);
        case DetectMethod::ChiSquare:
            return detect_chisq(grid_analysis(myogram, cfg), cfg);
        case DetectMethod::Alpha:
            return detect_alpha(myogram, cfg);
        case DetectMethod::WindowVariance:
            return detect_winvar(myogram, cfg);
    }
    throw ParameterError("run_detector: unknown method");
}

}  // namespace mixsep
