#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mixsep/mixture.hpp"

namespace mixsep {

struct EmConfig {
    int max_iterations = 500;
    /// Relative log-likelihood change below which iteration stops.
    double rel_tolerance = 1e-8;
    /// Lower bound on component scales, as a fraction of the sample std.
    double scale_floor = 1e-3;
    std::uint64_t seed = 0;
};

struct FitResult {
    NormalMixture mixture;
    std::vector<double> log_likelihood_trace;
    int iterations = 0;
    bool converged = false;
};

/// Fixed dictionary of normal components used by the weight-only EM variant.
/// Nodes are grouped by scale level; locations are strictly increasing within
/// each level.
class Grid {
public:
    Grid(std::vector<double> locations, std::vector<double> scales);

    /// `locations` evenly spaced nodes on [lo, hi], replicated at every scale
    /// in `scale_levels`.
    static Grid regular(double lo, double hi, int locations, std::span<const double> scale_levels);

    int size() const { return static_cast<int>(locations_.size()); }
    const std::vector<double>& locations() const { return locations_; }
    const std::vector<double>& scales() const { return scales_; }

    /// Mixture with these nodes and the given weights.
    NormalMixture mixture(std::span<const double> weights) const;

private:
    std::vector<double> locations_;
    std::vector<double> scales_;
};

/// Deterministic quantile-based starting point for em_fit.
NormalMixture initialize(std::span<const double> sample, int k, std::uint64_t seed = 0);

/// Sum of log densities; throws NumericalSupportError if any point has zero
/// density under the mixture.
double log_likelihood(const NormalMixture& mixture, std::span<const double> sample);

/// Maximum-likelihood fit of a k-component normal mixture.
///
/// The log-likelihood trace is nondecreasing up to a 1e-9 relative slack.
/// With a warm start the first trace entry is the warm start's likelihood.
FitResult em_fit(std::span<const double> sample, int k, const EmConfig& config = {},
                 const std::optional<NormalMixture>& warm_start = std::nullopt);

/// EM over grid-node weights only; component parameters stay fixed.
/// Returns the fitted weight vector (nonnegative, summing to one).
std::vector<double> grid_em_fit(std::span<const double> sample, const Grid& grid,
                                std::span<const double> warm_start = {},
                                const EmConfig& config = {});

}  // namespace mixsep
