#pragma once

#include <string>
#include <vector>

#include "mixsep/detect.hpp"
#include "mixsep/msm.hpp"

namespace mixsep::csv {

/// Single-column file with header "value".
std::vector<double> read_value_column(const std::string& path);
void write_value_column(const std::string& path, std::span<const double> values);

/// Single-column file with header "onset_ms".
std::vector<double> read_onsets(const std::string& path);
void write_onsets(const std::string& path, std::span<const double> onsets_ms);

/// Columns time_ms,detector.
EventList read_events(const std::string& path);
void write_events(const std::string& path, const EventList& events);

/// Columns index,dynamic,diffusive,degenerate.
void write_components(const std::string& path, const ComponentSeries& series);

/// Columns index,w1,...,wK.
void write_weights(const std::string& path, const WeightTrack& track);

/// Columns kind,detected_ms,actual_ms with kind in {match, false_positive, miss}.
void write_match_report(const std::string& path, const MatchReport& report);

/// Human-readable evaluation summary.
std::string format_match_report(const MatchReport& report, double tolerance_ms);

}  // namespace mixsep::csv
