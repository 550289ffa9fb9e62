#pragma once

#include <optional>
#include <span>

#include "mixsep/detect.hpp"
#include "mixsep/em.hpp"
#include "mixsep/nvm.hpp"

namespace mixsep {

enum class GridScaleReference { NodeSpacing, DataStd };

enum class DetectMethod { Msm, ZDistance, ChiSquare, Alpha, WindowVariance };

struct PipelineConfig {
    double sampling_rate_hz = 1000.0;
    /// Rest segment used for calibration, in record time.
    double calibration_start_ms = 0.0;
    double calibration_end_ms = 3000.0;

    int msm_window = 50;
    int msm_k = 3;
    EmConfig em;

    int grid_locations = 50;
    /// Node scale levels as multiples of grid_scale_reference.
    std::vector<double> grid_scale_factors = {0.5, 1.5};
    GridScaleReference grid_scale_reference = GridScaleReference::NodeSpacing;
    int grid_window = 100;
    int grid_shift = 1;

    DetectorParams detectors;
    double bound_q_low = 0.001;
    double bound_q_high = 0.999;
    double reconcile_tolerance_ms = 100.0;

    double winvar_width_ms = 40.0;
    /// Explicit variance threshold; when unset it is calibrated from the rest
    /// segment.
    std::optional<double> winvar_threshold;

    MixingFamily alpha_family = MixingFamily::GeneralizedGamma;
    NvmFitConfig alpha_fit;
    int alpha_window = 100;
    int alpha_shift = 1;
};

/// Forward and backward sliding-window mixture fits of the increment series.
struct Decomposition {
    ComponentSeries forward;
    ComponentSeries backward;
};

Decomposition decompose(std::span<const double> myogram, const PipelineConfig& cfg = {});

/// Grid spanning the given values; node scales derive from the node spacing
/// or the data std, per cfg.
Grid build_grid(std::span<const double> values, const PipelineConfig& cfg = {});

/// Shared input of the grid-based detectors: the dynamic component of the
/// forward pass plus its weight track.
struct GridAnalysis {
    std::vector<double> dynamic;
    WeightTrack track;
};

GridAnalysis grid_analysis(std::span<const double> myogram, const PipelineConfig& cfg = {});

EventList detect_msm(std::span<const double> myogram, const PipelineConfig& cfg = {});
EventList detect_zdist(const GridAnalysis& analysis, const PipelineConfig& cfg = {});
EventList detect_chisq(const GridAnalysis& analysis, const PipelineConfig& cfg = {});
EventList detect_alpha(std::span<const double> myogram, const PipelineConfig& cfg = {});
EventList detect_winvar(std::span<const double> myogram, const PipelineConfig& cfg = {});

/// Dispatches on `method`; the grid detectors build their analysis internally.
EventList run_detector(std::span<const double> myogram, DetectMethod method,
                       const PipelineConfig& cfg = {});

}  // namespace mixsep
