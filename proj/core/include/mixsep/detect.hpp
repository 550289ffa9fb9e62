#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixsep/msm.hpp"

namespace mixsep {

/// Detected event times in milliseconds, strictly increasing.
struct EventList {
    std::vector<double> times_ms;
    std::string detector;
};

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct DetectorParams {
    double z_threshold = 0.97;
    int z_lag = 100;
    double z_shift_ms = 150.0;
    /// Groups starting within this many windows of the previous kept group
    /// are dropped as reflections of the same movement.
    int reflection_window = 300;
    int chi_bins = 5;
    double chi_p_threshold = 0.9999;
    double chi_min_group_ms = 50.0;
    double chi_shift_ms = 50.0;
    double alpha_threshold = 1.0;
    int alpha_avg_window = 100;
    double alpha_shift_ms = 200.0;
    /// Candidate points closer than group_factor_j * window merge into one group.
    int group_factor_j = 2;
};

/// Empirical quantile band of the rest segment.
Bounds calibrate_bounds(std::span<const double> rest_values, double q_low = 0.001,
                        double q_high = 0.999);

/// Times at which the dynamic component leaves the calibrated band
/// (inside-to-outside transitions only).
std::vector<std::int64_t> threshold_crossings(const ComponentSeries& component,
                                              const Bounds& bounds);

/// Merges candidate points closer than j * window into groups and returns the
/// group means. Times are in the units of `points`.
EventList group_candidates(std::span<const std::int64_t> points, int window, int j);

/// Pairs nearest forward/backward events within `tolerance_ms` and returns the
/// pair midpoints.
EventList reconcile_fwd_bwd(const EventList& fwd, const EventList& bwd, double tolerance_ms);

/// Euclidean distance between weight rows `lag` apart: out[i] corresponds to
/// track row i + lag.
std::vector<double> z_distance_series(const WeightTrack& track, int lag = 100);

/// Marks z values above z_threshold, groups consecutive marks, drops groups
/// starting within reflection_window of the previous kept group, and shifts
/// group starts by z_shift_ms. Assumes the track behind `z` used shift 1.
EventList z_detector(std::span<const double> z, const DetectorParams& params = {},
                     double sampling_rate_hz = 1000.0);

/// Pearson chi-square p-value of `sample` against `fitted` over equiprobable bins.
double chi_square_pvalue(std::span<const double> sample, const NormalMixture& fitted,
                         int bins = 5);

/// Marks windows whose fitted grid mixture matches the window's own data with
/// p-value above chi_p_threshold, then reports groups at least
/// chi_min_group_ms long, shifted forward by chi_shift_ms.
EventList stability_detector(const WeightTrack& track, std::span<const double> series,
                             const DetectorParams& params = {}, double sampling_rate_hz = 1000.0);

/// Marks positions where the trailing alpha_avg_window average of |alpha|
/// exceeds alpha_threshold; group starts are shifted back by alpha_shift_ms.
EventList alpha_detector(std::span<const double> alpha_series, const DetectorParams& params = {},
                         double sampling_rate_hz = 1000.0);

/// Rising crossings of the rolling variance over width_ms windows, grouped
/// with group_candidates(j = 2).
EventList window_variance_detector(std::span<const double> myogram, double width_ms,
                                   double threshold, double sampling_rate_hz = 1000.0);

struct MatchReport {
    /// (detected, actual) pairs, ordered by detected time.
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> false_positives;
    std::vector<double> misses;
    double mean_abs_error_ms = 0.0;
};

/// Greedy nearest-first matching of detected to actual events within
/// tolerance_ms; each event is used at most once.
MatchReport match_events(const EventList& detected, const EventList& actual, double tolerance_ms);

}  // namespace mixsep
