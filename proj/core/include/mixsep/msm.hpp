#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixsep/em.hpp"
#include "mixsep/mixture.hpp"

namespace mixsep {

enum class Direction { Forward, Backward };

/// Per-window mixture fits over a sliding window, with the variance of each
/// window split into its dynamic and diffusive parts.
///
/// Entry p covers input samples [p, p + window_size). For a forward pass
/// times[p] is the window's right edge p + window_size - 1; for a backward
/// pass it is the left edge p (the trailing edge in scan order, in both
/// cases). degenerate[p] is nonzero where the window was constant and a
/// placeholder fit was recorded instead.
struct ComponentSeries {
    int window_size = 0;
    Direction direction = Direction::Forward;
    std::vector<std::int64_t> times;
    std::vector<double> dynamic;
    std::vector<double> diffusive;
    std::vector<NormalMixture> mixtures;
    std::vector<std::uint8_t> degenerate;
};

/// Weight trajectories of a grid fit: row r holds the node weights fitted on
/// samples [r * shift, r * shift + window_size).
struct WeightTrack {
    Grid grid;
    int window_size = 0;
    int shift = 1;
    std::vector<std::vector<double>> weights;
};

/// First differences x[i+1] - x[i].
std::vector<double> increments(std::span<const double> series);

/// Sliding-window k-component mixture fit over `series`, warm-starting each
/// window from its predecessor. Windows whose predecessor fit collapsed to
/// coincident components restart from their own quantile initialization, so
/// a collapse cannot freeze the remainder of the pass. A backward pass
/// processes the reversed series and reports results back on the original
/// time axis.
ComponentSeries msm_pass(std::span<const double> series, int window, int k,
                         const EmConfig& config = {}, Direction direction = Direction::Forward);

/// Sliding-window weight-only fit against a fixed grid.
WeightTrack grid_msm_pass(std::span<const double> series, const Grid& grid, int window = 100,
                          int shift = 1, const EmConfig& config = {});

}  // namespace mixsep
