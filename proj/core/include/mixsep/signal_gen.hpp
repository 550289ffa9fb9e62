#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mixsep {

/// One rest-then-movement stretch of a synthetic record.
struct EpochSpec {
    double rest_duration_ms = 2000.0;
    double movement_duration_ms = 400.0;
    double rest_noise_sigma = 1.0;
    double movement_noise_sigma = 10.0;
    double signal_amplitude = 0.0;
    double signal_frequency_hz = 12.0;
};

struct SyntheticRecord {
    std::vector<double> samples;
    double sampling_rate_hz = 1000.0;
    /// One onset per epoch: the exact start of its movement stretch.
    std::vector<double> true_onsets_ms;
    std::uint64_t seed = 0;
};

/// Concatenates the epochs into one record: Gaussian rest noise, then louder
/// movement noise plus an optional enveloped sine burst. Onsets are returned
/// exactly as configured (cumulative rest/movement durations), untouched by
/// sampling.
SyntheticRecord generate_myogram(std::span<const EpochSpec> epochs,
                                 double sampling_rate_hz = 1000.0, std::uint64_t seed = 0);

}  // namespace mixsep
