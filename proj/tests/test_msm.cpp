#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mixsep/errors.hpp"
#include "mixsep/msm.hpp"

using namespace mixsep;

namespace {

std::vector<double> noise(std::size_t n, double sigma, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> out(n);
    for (double& x : out) x = normal(engine);
    return out;
}

}  // namespace

TEST_CASE("increments") {
    const std::vector<double> xs{0.0, 1.0, 3.0, 6.0};
    CHECK(increments(xs) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK_THROWS_AS(increments(std::vector<double>{1.0}), SizeError);
}

TEST_CASE("forward pass tracks a variance jump") {
    std::vector<double> series = noise(300, 0.1, 1);
    const std::vector<double> loud = noise(200, 2.0, 2);
    series.insert(series.end(), loud.begin(), loud.end());

    const int w = 30;
    const ComponentSeries fwd = msm_pass(series, w, 2);
    CHECK(fwd.direction == Direction::Forward);
    CHECK(fwd.times.size() == series.size() - w + 1);
    CHECK(fwd.window_size == w);

    for (std::size_t p = 0; p < fwd.times.size(); ++p) {
        CHECK(fwd.times[p] == static_cast<std::int64_t>(p) + w - 1);
        const VarianceSplit split = fwd.mixtures[p].variance_decomposition();
        CHECK(fwd.dynamic[p] + fwd.diffusive[p] == split.total);
        CHECK(fwd.degenerate[p] == 0);
    }

    // total variance roughly matches each regime
    double quiet = 0.0, loud_total = 0.0;
    for (std::size_t p = 100; p < 200; ++p) quiet += fwd.dynamic[p] + fwd.diffusive[p];
    for (std::size_t p = 350; p < 450; ++p) loud_total += fwd.dynamic[p] + fwd.diffusive[p];
    quiet /= 100.0;
    loud_total /= 100.0;
    CHECK(quiet < 0.05);
    CHECK(loud_total > 1.0);
}

TEST_CASE("backward pass equals the index-reversed forward pass of the reversed input") {
    const std::vector<double> series = noise(120, 1.0, 3);
    const int w = 20;

    const ComponentSeries bwd = msm_pass(series, w, 2, {}, Direction::Backward);
    std::vector<double> reversed(series.rbegin(), series.rend());
    const ComponentSeries fwd_rev = msm_pass(reversed, w, 2, {}, Direction::Forward);

    REQUIRE(bwd.dynamic.size() == fwd_rev.dynamic.size());
    const std::size_t m = bwd.dynamic.size();
    for (std::size_t p = 0; p < m; ++p) {
        CHECK(bwd.dynamic[p] == fwd_rev.dynamic[m - 1 - p]);
        CHECK(bwd.diffusive[p] == fwd_rev.diffusive[m - 1 - p]);
        CHECK(bwd.mixtures[p].to_record() == fwd_rev.mixtures[m - 1 - p].to_record());
        CHECK(bwd.times[p] == static_cast<std::int64_t>(p));
    }
    CHECK(bwd.direction == Direction::Backward);
}

TEST_CASE("constant windows fall back and are flagged") {
    std::vector<double> series = noise(40, 1.0, 4);
    series.insert(series.end(), 40, 3.0);
    const std::vector<double> tail = noise(40, 1.0, 5);
    series.insert(series.end(), tail.begin(), tail.end());

    const int w = 20;
    const ComponentSeries fwd = msm_pass(series, w, 2);
    bool saw_degenerate = false;
    for (std::size_t p = 0; p < fwd.times.size(); ++p) {
        const bool fully_inside_plateau = p >= 40 && p + w <= 80;
        CHECK(int(fwd.degenerate[p]) == int(fully_inside_plateau));
        if (fwd.degenerate[p]) {
            saw_degenerate = true;
            CHECK(fwd.dynamic[p] == 0.0);
            CHECK(fwd.diffusive[p] > 0.0);
            CHECK(fwd.mixtures[p].locations()[0] == 3.0);
        }
    }
    CHECK(saw_degenerate);
}

TEST_CASE("msm_pass validates input") {
    const std::vector<double> series = noise(50, 1.0, 6);
    CHECK_THROWS_AS(msm_pass(series, 15, 2), SizeError);            // window < 10k
    CHECK_THROWS_AS(msm_pass(series, 60, 2), SizeError);            // series shorter than window
    CHECK_THROWS_AS(msm_pass(series, 20, 0), ParameterError);
}

TEST_CASE("grid pass yields simplex rows that drift slowly on stationary data") {
    const std::vector<double> series = noise(400, 1.0, 7);
    const Grid grid = Grid::regular(-4.0, 4.0, 15, std::vector{0.6});
    const WeightTrack track = grid_msm_pass(series, grid, 100, 25);

    CHECK(track.window_size == 100);
    CHECK(track.shift == 25);
    CHECK(track.weights.size() == (400 - 100) / 25 + 1);

    for (const auto& row : track.weights) {
        REQUIRE(row.size() == static_cast<std::size_t>(grid.size()));
        double sum = 0.0;
        for (double wgt : row) {
            CHECK(wgt >= 0.0);
            sum += wgt;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    int calm_pairs = 0;
    for (std::size_t r = 1; r < track.weights.size(); ++r) {
        double max_diff = 0.0;
        for (std::size_t c = 0; c < track.weights[r].size(); ++c)
            max_diff = std::max(max_diff,
                                std::fabs(track.weights[r][c] - track.weights[r - 1][c]));
        if (max_diff < 0.15) ++calm_pairs;
    }
    CHECK(calm_pairs >= static_cast<int>(track.weights.size()) - 2);
}

TEST_CASE("grid pass errors name the failing window") {
    const std::vector<double> series = noise(60, 1.0, 8);
    const Grid far{std::vector<double>{1000.0, 1010.0}, std::vector<double>{0.01, 0.01}};
    try {
        grid_msm_pass(series, far, 20, 1);
        FAIL("expected NumericalSupportError");
    } catch (const NumericalSupportError& e) {
        CHECK(std::string(e.what()).find("grid window 0") != std::string::npos);
    }
    CHECK_THROWS_AS(grid_msm_pass(series, far, 20, 0), ParameterError);
    CHECK_THROWS_AS(grid_msm_pass(series, far, 5, 1), SizeError);
    CHECK_THROWS_AS(grid_msm_pass(std::vector<double>(10, 1.0), far, 20, 1), SizeError);
}
