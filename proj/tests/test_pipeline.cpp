#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixsep/errors.hpp"
#include "mixsep/pipeline.hpp"
#include "mixsep/signal_gen.hpp"

using namespace mixsep;

namespace {

SyntheticRecord four_epoch_record() {
    // Short movements keep the forward and backward candidates within
    // reconciling distance; the burst gives each movement a real trend, so
    // the dynamic component stays high for the whole stretch instead of
    // flip-flopping between split and merged fits of plain noise.
    std::vector<EpochSpec> epochs(4, EpochSpec{1500.0, 80.0, 1.0, 8.0, 150.0, 12.0});
    return generate_myogram(epochs, 1000.0, 2718);
}

double nearest_error(const std::vector<double>& events, double onset) {
    double best = 1e18;
    for (double t : events) best = std::min(best, std::fabs(t - onset));
    return best;
}

}  // namespace

TEST_CASE("build_grid spans the data with the chosen scale reference") {
    PipelineConfig cfg;
    cfg.grid_locations = 6;
    cfg.grid_scale_factors = {1.0};

    const std::vector<double> values{0.0, 10.0};
    const Grid by_spacing = build_grid(values, cfg);
    REQUIRE(by_spacing.size() == 6);
    CHECK(by_spacing.locations().front() == 0.0);
    CHECK(by_spacing.locations().back() == 10.0);
    CHECK(by_spacing.scales()[0] == doctest::Approx(2.0));  // node spacing 10/5

    cfg.grid_scale_reference = GridScaleReference::DataStd;
    const Grid by_std = build_grid(values, cfg);
    CHECK(by_std.scales()[0] == doctest::Approx(5.0));  // population std of {0, 10}

    cfg.grid_scale_factors = {0.5, 1.5};
    const Grid two_levels = build_grid(values, cfg);
    CHECK(two_levels.size() == 12);

    CHECK_THROWS_AS(build_grid(std::vector<double>{1.0}, cfg), SizeError);
    CHECK_THROWS_AS(build_grid(std::vector<double>(10, 3.0), cfg), DegenerateDataError);
    cfg.grid_scale_factors = {-1.0};
    CHECK_THROWS_AS(build_grid(values, cfg), ParameterError);
}

TEST_CASE("decompose runs both directions over the increments") {
    const SyntheticRecord rec = four_epoch_record();
    PipelineConfig cfg;
    cfg.msm_window = 50;
    cfg.msm_k = 2;

    const Decomposition d = decompose(rec.samples, cfg);
    CHECK(d.forward.direction == Direction::Forward);
    CHECK(d.backward.direction == Direction::Backward);
    // increments shorten the record by one; windows by window - 1 more
    CHECK(d.forward.dynamic.size() == rec.samples.size() - 1 - 50 + 1);
    CHECK(d.backward.dynamic.size() == d.forward.dynamic.size());
}

TEST_CASE("msm detector finds the onsets of a four-epoch record") {
    const SyntheticRecord rec = four_epoch_record();
    PipelineConfig cfg;
    cfg.msm_window = 50;
    cfg.msm_k = 2;
    cfg.calibration_start_ms = 0.0;
    cfg.calibration_end_ms = 1400.0;

    const EventList events = detect_msm(rec.samples, cfg);
    CHECK(events.detector == "msm");
    CHECK(events.times_ms.size() >= 3);
    CHECK(events.times_ms.size() <= 6);

    int hits = 0;
    for (double onset : rec.true_onsets_ms)
        if (nearest_error(events.times_ms, onset) <= 60.0) ++hits;
    CHECK(hits >= 3);
}

TEST_CASE("msm detector rejects an empty calibration segment") {
    const SyntheticRecord rec = four_epoch_record();
    PipelineConfig cfg;
    cfg.msm_window = 50;
    cfg.msm_k = 2;
    cfg.calibration_end_ms = 40.0;  // shorter than one window
    CHECK_THROWS_AS(detect_msm(rec.samples, cfg), CalibrationError);
}

TEST_CASE("window variance detector works with explicit and calibrated thresholds") {
    const SyntheticRecord rec = four_epoch_record();
    PipelineConfig cfg;
    cfg.calibration_end_ms = 1400.0;
    cfg.winvar_threshold = 25.0;

    const EventList explicit_thr = detect_winvar(rec.samples, cfg);
    CHECK(explicit_thr.detector == "winvar");
    int hits = 0;
    for (double onset : rec.true_onsets_ms)
        if (nearest_error(explicit_thr.times_ms, onset) <= 50.0) ++hits;
    CHECK(hits == 4);

    cfg.winvar_threshold.reset();
    const EventList calibrated = detect_winvar(rec.samples, cfg);
    hits = 0;
    for (double onset : rec.true_onsets_ms)
        if (nearest_error(calibrated.times_ms, onset) <= 50.0) ++hits;
    CHECK(hits >= 3);

    cfg.calibration_end_ms = 100.0;  // too short to calibrate
    CHECK_THROWS_AS(detect_winvar(rec.samples, cfg), CalibrationError);
}

TEST_CASE("grid detectors run by dispatch on a two-epoch record") {
    std::vector<EpochSpec> epochs(2, EpochSpec{1200.0, 300.0, 1.0, 8.0, 0.0, 12.0});
    const SyntheticRecord rec = generate_myogram(epochs, 1000.0, 31);

    PipelineConfig cfg;
    cfg.msm_window = 50;
    cfg.msm_k = 2;
    cfg.grid_locations = 20;
    cfg.grid_window = 100;
    cfg.grid_shift = 10;
    cfg.detectors.z_lag = 10;         // rows; 100 samples at this shift
    cfg.detectors.z_threshold = 0.6;
    cfg.detectors.reflection_window = 60;  // rows; 600 samples at this shift

    const GridAnalysis analysis = grid_analysis(rec.samples, cfg);
    CHECK(analysis.track.shift == 10);
    REQUIRE(!analysis.track.weights.empty());
    for (const auto& row : analysis.track.weights) {
        double sum = 0.0;
        for (double w : row) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }

    const EventList z_events = detect_zdist(analysis, cfg);
    CHECK(z_events.detector == "zdist");
    REQUIRE(!z_events.times_ms.empty());
    CHECK(nearest_error(z_events.times_ms, 1200.0) <= 450.0);

    // dispatch goes through the same code paths
    const EventList via_dispatch = run_detector(rec.samples, DetectMethod::ZDistance, cfg);
    CHECK(via_dispatch.times_ms == z_events.times_ms);

    const EventList chi_events = detect_chisq(analysis, cfg);
    CHECK(chi_events.detector == "chisq");
    for (double t : chi_events.times_ms) CHECK(std::isfinite(t));
}

TEST_CASE("alpha detector end to end is wired") {
    std::vector<EpochSpec> epochs(1, EpochSpec{250.0, 150.0, 1.0, 8.0, 0.0, 12.0});
    const SyntheticRecord rec = generate_myogram(epochs, 1000.0, 8);

    PipelineConfig cfg;
    cfg.alpha_window = 100;
    cfg.alpha_shift = 50;
    const EventList events = detect_alpha(rec.samples, cfg);
    CHECK(events.detector == "alpha");
    for (double t : events.times_ms) CHECK(std::isfinite(t));
}
