#include "mixsep/signal_gen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "mixsep/errors.hpp"

namespace mixsep {

namespace {

void validate(const EpochSpec& e) {
    if (!(e.rest_duration_ms > 0.0) || !(e.movement_duration_ms > 0.0))
        throw ParameterError("epoch: durations must be positive");
    if (e.rest_noise_sigma < 0.0 || e.movement_noise_sigma < 0.0)
        throw ParameterError("epoch: noise sigmas must be nonnegative");
    const bool silent = e.rest_noise_sigma == 0.0 && e.movement_noise_sigma == 0.0 &&
                        e.signal_amplitude == 0.0;
    if (!silent && !(e.movement_noise_sigma > e.rest_noise_sigma) && e.signal_amplitude == 0.0)
        throw ParameterError("epoch: movement must be louder than rest (or carry a burst)");
    if (e.signal_amplitude < 0.0) throw ParameterError("epoch: amplitude must be nonnegative");
    if (e.signal_amplitude > 0.0 && !(e.signal_frequency_hz > 0.0))
        throw ParameterError("epoch: burst frequency must be positive");
}

}  // namespace

SyntheticRecord generate_myogram(std::span<const EpochSpec> epochs, double sampling_rate_hz,
                                 std::uint64_t seed) {
    if (epochs.empty()) throw ParameterError("generate_myogram: needs at least one epoch");
    if (!(sampling_rate_hz > 0.0)) throw ParameterError("generate_myogram: bad sampling rate");
    for (const EpochSpec& e : epochs) validate(e);

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    SyntheticRecord record;
    record.sampling_rate_hz = sampling_rate_hz;
    record.seed = seed;

    double clock_ms = 0.0;
    const double dt_ms = 1000.0 / sampling_rate_hz;
    for (const EpochSpec& e : epochs) {
        const auto rest_n = static_cast<std::size_t>(std::llround(e.rest_duration_ms / dt_ms));
        const auto move_n = static_cast<std::size_t>(std::llround(e.movement_duration_ms / dt_ms));
        for (std::size_t i = 0; i < rest_n; ++i)
            record.samples.push_back(e.rest_noise_sigma * unit(engine));

        record.true_onsets_ms.push_back(clock_ms + e.rest_duration_ms);

        const double mid = 0.5 * e.movement_duration_ms;
        const double width = e.movement_duration_ms / 6.0;
        for (std::size_t i = 0; i < move_n; ++i) {
            const double t_ms = static_cast<double>(i) * dt_ms;
            double v = e.movement_noise_sigma * unit(engine);
            if (e.signal_amplitude > 0.0) {
                const double envelope = std::exp(-0.5 * std::pow((t_ms - mid) / width, 2.0));
                v += e.signal_amplitude * envelope *
                     std::sin(2.0 * std::numbers::pi * e.signal_frequency_hz * t_ms / 1000.0);
            }
            record.samples.push_back(v);
        }
        clock_ms += e.rest_duration_ms + e.movement_duration_ms;
    }
    return record;
}

}  // namespace mixsep
