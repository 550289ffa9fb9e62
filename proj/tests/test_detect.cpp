#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mixsep/detect.hpp"
#include "mixsep/errors.hpp"
#include "mixsep/special.hpp"

using namespace mixsep;

namespace {

ComponentSeries series_with_dynamic(std::vector<double> dynamic) {
    ComponentSeries out;
    out.window_size = 10;
    for (std::size_t p = 0; p < dynamic.size(); ++p) {
        out.times.push_back(static_cast<std::int64_t>(p) + 9);
        out.diffusive.push_back(0.0);
        out.degenerate.push_back(0);
        out.mixtures.push_back(NormalMixture::single(0.0, 1.0));
    }
    out.dynamic = std::move(dynamic);
    return out;
}

WeightTrack track_from_rows(std::vector<std::vector<double>> rows, int window = 100,
                            int shift = 1) {
    Grid grid = Grid::regular(0.0, 1.0, static_cast<int>(rows.front().size()), std::vector{1.0});
    return {std::move(grid), window, shift, std::move(rows)};
}

// sample whose bin counts under N(0,1) quantile cuts are exactly uniform
std::vector<double> perfectly_binned_normal(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = special::normal_quantile((static_cast<double>(j) + 0.5) / static_cast<double>(n));
    return out;
}

}  // namespace

TEST_CASE("calibrate_bounds finds normal quantiles") {
    std::mt19937_64 engine(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> rest(100000);
    for (double& x : rest) x = normal(engine);

    const Bounds b = calibrate_bounds(rest);
    CHECK(b.lower == doctest::Approx(-3.090232306167813).scale(1.0).epsilon(0.07));
    CHECK(b.upper == doctest::Approx(3.090232306167813).scale(1.0).epsilon(0.07));

    CHECK_THROWS_AS(calibrate_bounds(std::vector<double>(50, 1.0)), CalibrationError);
    CHECK_THROWS_AS(calibrate_bounds(std::vector<double>(200, 1.0)), CalibrationError);
    CHECK_THROWS_AS(calibrate_bounds(rest, 0.9, 0.1), ParameterError);
}

TEST_CASE("threshold crossings fire on leaving the band only") {
    const ComponentSeries cs = series_with_dynamic({0.0, 0.0, 5.0, 5.0, 0.0, 7.0, 0.5});
    const auto crossings = threshold_crossings(cs, {-1.0, 1.0});
    CHECK(crossings == std::vector<std::int64_t>{11, 14});

    // starting outside the band is not a crossing
    const ComponentSeries cs2 = series_with_dynamic({5.0, 0.0, 5.0});
    CHECK(threshold_crossings(cs2, {-1.0, 1.0}) == std::vector<std::int64_t>{11});

    CHECK_THROWS_AS(threshold_crossings(cs, {2.0, 1.0}), ParameterError);
}

TEST_CASE("group_candidates merges near points") {
    CHECK(group_candidates(std::vector<std::int64_t>{100, 110, 120}, 25, 2).times_ms ==
          std::vector<double>{110.0});
    CHECK(group_candidates(std::vector<std::int64_t>{100, 400}, 50, 2).times_ms ==
          std::vector<double>{100.0, 400.0});
    // a gap equal to j * window starts a new group
    CHECK(group_candidates(std::vector<std::int64_t>{0, 100}, 50, 2).times_ms ==
          std::vector<double>{0.0, 100.0});
    CHECK(group_candidates(std::vector<std::int64_t>{0, 99}, 50, 2).times_ms ==
          std::vector<double>{49.5});
    CHECK(group_candidates(std::vector<std::int64_t>{}, 50, 2).times_ms.empty());

    CHECK_THROWS_AS(group_candidates(std::vector<std::int64_t>{5, 1}, 50, 2), ValidationError);
    CHECK_THROWS_AS(group_candidates(std::vector<std::int64_t>{1}, 0, 2), ParameterError);
}

TEST_CASE("reconcile pairs nearest forward and backward events") {
    EventList fwd, bwd;
    fwd.detector = "msm";
    fwd.times_ms = {1000.0, 5000.0};
    bwd.times_ms = {1040.0, 8000.0};
    const EventList out = reconcile_fwd_bwd(fwd, bwd, 100.0);
    CHECK(out.times_ms == std::vector<double>{1020.0});
    CHECK(out.detector == "msm");

    // tie goes to the earlier forward event
    EventList f2, b2;
    f2.times_ms = {100.0, 130.0};
    b2.times_ms = {115.0};
    CHECK(reconcile_fwd_bwd(f2, b2, 50.0).times_ms == std::vector<double>{107.5});

    CHECK(reconcile_fwd_bwd(EventList{}, bwd, 100.0).times_ms.empty());
    CHECK_THROWS_AS(reconcile_fwd_bwd(fwd, bwd, -1.0), ParameterError);
}

TEST_CASE("z distance between weight rows") {
    WeightTrack track = track_from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    const auto z = z_distance_series(track, 1);
    REQUIRE(z.size() == 2);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(z_distance_series(track, 3), SizeError);
    CHECK_THROWS_AS(z_distance_series(track, 0), ParameterError);
}

TEST_CASE("z detector shift arithmetic is exact") {
    // run of high z starting at vector offset 3824: with lag 100 that is
    // window 3924, and the reported event lands at 4074 ms
    std::vector<double> z(4500, 0.1);
    for (std::size_t i = 3824; i < 3900; ++i) z[i] = 0.99;
    const EventList events = z_detector(z);
    REQUIRE(events.times_ms.size() == 1);
    CHECK(events.times_ms[0] == 4074.0);
    CHECK(events.detector == "zdist");
}

TEST_CASE("z detector drops reflections") {
    std::vector<double> z(1200, 0.0);
    for (std::size_t i = 100; i < 120; ++i) z[i] = 1.0;
    for (std::size_t i = 350; i < 370; ++i) z[i] = 1.0;  // 250 after the first: reflection
    for (std::size_t i = 900; i < 920; ++i) z[i] = 1.0;  // 800 after: kept
    const EventList events = z_detector(z);
    REQUIRE(events.times_ms.size() == 2);
    CHECK(events.times_ms[0] == doctest::Approx(100.0 + 100.0 + 150.0));
    CHECK(events.times_ms[1] == doctest::Approx(900.0 + 100.0 + 150.0));
}

TEST_CASE("chi-square p-value is exactly one on perfect counts") {
    const NormalMixture m = NormalMixture::single(0.0, 1.0);
    const std::vector<double> sample = perfectly_binned_normal(100);
    CHECK(chi_square_pvalue(sample, m, 5) == 1.0);

    // shifting the sample wrecks the fit
    std::vector<double> shifted = sample;
    for (double& x : shifted) x += 3.0;
    CHECK(chi_square_pvalue(shifted, m, 5) < 1e-6);

    CHECK_THROWS_AS(chi_square_pvalue(std::vector<double>(20, 1.0), m, 5), SizeError);
    CHECK_THROWS_AS(chi_square_pvalue(sample, m, 1), ParameterError);
}

TEST_CASE("chi-square p-values are near-uniform under the true model") {
    const NormalMixture m = NormalMixture::single(0.0, 1.0);
    std::mt19937_64 engine(2024);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> pvalues;
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> window(500);
        for (double& x : window) x = normal(engine);
        pvalues.push_back(chi_square_pvalue(window, m, 5));
    }
    std::sort(pvalues.begin(), pvalues.end());

    double ks = 0.0;
    const double n = static_cast<double>(pvalues.size());
    for (std::size_t i = 0; i < pvalues.size(); ++i) {
        ks = std::max(ks, std::fabs((i + 1) / n - pvalues[i]));
        ks = std::max(ks, std::fabs(pvalues[i] - i / n));
    }
    CHECK(ks < 0.1);
}

TEST_CASE("stability detector flags well-fitted stretches, shifted by 50 ms") {
    // rows at shift 100 whose windows each hold a perfectly binned sample
    const std::vector<double> window = perfectly_binned_normal(100);
    std::vector<double> series;
    for (int rep = 0; rep < 3; ++rep) series.insert(series.end(), window.begin(), window.end());

    Grid grid({0.0, 10.0}, {1.0, 1.0});
    WeightTrack track{grid, 100, 100, {}};
    track.weights.assign(3, {1.0, 0.0});
    const EventList events = stability_detector(track, series);
    REQUIRE(events.times_ms.size() == 1);
    CHECK(events.times_ms[0] == 50.0);  // group start 0 ms plus the 50 ms shift
    CHECK(events.detector == "chisq");
}

TEST_CASE("stability detector drops groups shorter than 50 ms") {
    const std::vector<double> window = perfectly_binned_normal(100);
    std::vector<double> series = window;
    std::mt19937_64 engine(9);
    std::normal_distribution<double> normal(5.0, 0.3);  // later windows fit the mixture badly
    for (int i = 0; i < 200; ++i) series.push_back(normal(engine));

    Grid grid({0.0, 10.0}, {1.0, 1.0});
    WeightTrack track{grid, 100, 25, {}};
    track.weights.assign(9, {1.0, 0.0});
    const EventList events = stability_detector(track, series);
    CHECK(events.times_ms.empty());  // single 25 ms group, below the 50 ms minimum
}

TEST_CASE("alpha detector shift arithmetic is exact") {
    // |alpha| jumps to 2 at index 3261, so the trailing-100 average first
    // exceeds 1 at index 3311 and the event lands at 3111 ms
    std::vector<double> alpha(4000, 0.0);
    for (std::size_t i = 3261; i < alpha.size(); ++i) alpha[i] = 2.0;
    const EventList events = alpha_detector(alpha);
    REQUIRE(events.times_ms.size() == 1);
    CHECK(events.times_ms[0] == 3111.0);
    CHECK(events.detector == "alpha");
}

TEST_CASE("alpha detector keeps early events with negative times") {
    const std::vector<double> alpha(300, 2.0);
    const EventList events = alpha_detector(alpha);
    REQUIRE(events.times_ms.size() == 1);
    CHECK(events.times_ms[0] == 99.0 - 200.0);
}

TEST_CASE("window variance detector sees a noise jump") {
    std::mt19937_64 engine(13);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> series(6000);
    for (std::size_t i = 0; i < series.size(); ++i)
        series[i] = normal(engine) * (i < 3000 ? 1.0 : 10.0);

    const EventList events = window_variance_detector(series, 40.0, 25.0);
    REQUIRE(!events.times_ms.empty());
    CHECK(std::fabs(events.times_ms.front() - 3000.0) <= 45.0);

    // threshold above the global maximum: nothing fires
    const EventList none = window_variance_detector(series, 40.0, 1e7);
    CHECK(none.times_ms.empty());

    // constant signal has zero variance everywhere
    const EventList flat = window_variance_detector(std::vector<double>(500, 1.0), 40.0, 0.5);
    CHECK(flat.times_ms.empty());

    CHECK_THROWS_AS(window_variance_detector(series, 20.0, 25.0), ParameterError);
    CHECK_THROWS_AS(window_variance_detector(series, 40.0, -1.0), ParameterError);
    CHECK_THROWS_AS(window_variance_detector(std::vector<double>(10, 1.0), 40.0, 1.0), SizeError);
}

namespace {

// reference matcher: repeatedly pick the globally closest unused pair
MatchReport naive_match(std::vector<double> detected, std::vector<double> actual, double tol) {
    MatchReport report;
    std::vector<bool> used_d(detected.size(), false), used_a(actual.size(), false);
    while (true) {
        double best = tol;
        std::size_t bd = detected.size(), ba = actual.size();
        for (std::size_t d = 0; d < detected.size(); ++d)
            for (std::size_t a = 0; a < actual.size(); ++a) {
                if (used_d[d] || used_a[a]) continue;
                const double dist = std::fabs(detected[d] - actual[a]);
                if (dist <= best && (bd == detected.size() || dist < best)) {
                    best = dist;
                    bd = d;
                    ba = a;
                }
            }
        if (bd == detected.size()) break;
        used_d[bd] = used_a[ba] = true;
        report.pairs.emplace_back(detected[bd], actual[ba]);
    }
    std::sort(report.pairs.begin(), report.pairs.end());
    double acc = 0.0;
    for (const auto& [d, a] : report.pairs) acc += std::fabs(d - a);
    for (std::size_t d = 0; d < detected.size(); ++d)
        if (!used_d[d]) report.false_positives.push_back(detected[d]);
    for (std::size_t a = 0; a < actual.size(); ++a)
        if (!used_a[a]) report.misses.push_back(actual[a]);
    report.mean_abs_error_ms = report.pairs.empty() ? 0.0 : acc / report.pairs.size();
    return report;
}

}  // namespace

TEST_CASE("match report on a full detection run") {
    EventList detected, actual;
    detected.times_ms = {4074.0,  5608.0,  6256.0,  8446.0,  11284.0, 12938.0,
                         15017.0, 17327.0, 19685.0, 21321.0, 23531.0};
    actual.times_ms = {4032.0,  8443.0,  11298.0, 12917.0, 14976.0,
                       17326.0, 19688.0, 21337.0, 23539.0};

    const MatchReport report = match_events(detected, actual, 100.0);
    CHECK(report.pairs.size() == 9);
    CHECK(report.false_positives == std::vector<double>{5608.0, 6256.0});
    CHECK(report.misses.empty());
    CHECK(report.mean_abs_error_ms == doctest::Approx(149.0 / 9.0).epsilon(1e-12));

    const MatchReport reference = naive_match(detected.times_ms, actual.times_ms, 100.0);
    CHECK(report.pairs == reference.pairs);
    CHECK(report.false_positives == reference.false_positives);
    CHECK(report.misses == reference.misses);
    CHECK(report.mean_abs_error_ms == doctest::Approx(reference.mean_abs_error_ms).epsilon(1e-12));
}

TEST_CASE("match_events pairs nearest within tolerance") {
    EventList detected, actual;
    detected.times_ms = {95.0, 300.0, 1000.0};
    actual.times_ms = {100.0, 310.0, 2000.0};
    const MatchReport report = match_events(detected, actual, 100.0);
    REQUIRE(report.pairs.size() == 2);
    CHECK(report.pairs[0] == std::pair{95.0, 100.0});
    CHECK(report.pairs[1] == std::pair{300.0, 310.0});
    CHECK(report.false_positives == std::vector<double>{1000.0});
    CHECK(report.misses == std::vector<double>{2000.0});
    CHECK(report.mean_abs_error_ms == doctest::Approx(7.5));

    // each actual event is consumed once
    EventList d2, a2;
    d2.times_ms = {100.0, 104.0};
    a2.times_ms = {102.0};
    const MatchReport r2 = match_events(d2, a2, 10.0);
    CHECK(r2.pairs.size() == 1);
    CHECK(r2.pairs[0] == std::pair{100.0, 102.0});
    CHECK(r2.false_positives == std::vector<double>{104.0});

    CHECK_THROWS_AS(match_events(d2, a2, -5.0), ParameterError);
}
