#include "mixsep/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mixsep/errors.hpp"

namespace mixsep::csv {

namespace {

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_number(const std::string& token, const std::string& path, std::size_t line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + token + "'");
    return v;
}

bool looks_numeric(const std::string& token) {
    const char* begin = token.c_str();
    char* end = nullptr;
    (void)std::strtod(begin, &end);
    return end != begin && *end == '\0';
}

std::vector<double> read_single_column(const std::string& path, const std::string& header) {
    std::ifstream in = open_in(path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        if (line_no == 1 && !looks_numeric(line)) {
            if (line != header)
                throw ParseError(path + ":1: expected header '" + header + "', got '" + line + "'");
            continue;
        }
        values.push_back(parse_number(line, path, line_no));
    }
    return values;
}

void write_single_column(const std::string& path, const std::string& header,
                         std::span<const double> values) {
    std::ofstream out = open_out(path);
    out << header << '\n';
    for (double v : values) out << format_full(v) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::vector<double> read_value_column(const std::string& path) {
    return read_single_column(path, "value");
}

void write_value_column(const std::string& path, std::span<const double> values) {
    write_single_column(path, "value", values);
}

std::vector<double> read_onsets(const std::string& path) {
    return read_single_column(path, "onset_ms");
}

void write_onsets(const std::string& path, std::span<const double> onsets_ms) {
    write_single_column(path, "onset_ms", onsets_ms);
}

EventList read_events(const std::string& path) {
    std::ifstream in = open_in(path);
    EventList events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'time_ms,detector'");
        const std::string first = line.substr(0, comma);
        const std::string second = line.substr(comma + 1);
        if (line_no == 1 && !looks_numeric(first)) {
            if (first != "time_ms" || second != "detector")
                throw ParseError(path + ":1: expected header 'time_ms,detector'");
            continue;
        }
        events.times_ms.push_back(parse_number(first, path, line_no));
        if (events.detector.empty())
            events.detector = second;
        else if (events.detector != second)
            throw ParseError(path + ":" + std::to_string(line_no) + ": mixed detector labels");
    }
    return events;
}

void write_events(const std::string& path, const EventList& events) {
    std::ofstream out = open_out(path);
    out << "time_ms,detector\n";
    for (double t : events.times_ms) out << format_full(t) << ',' << events.detector << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_components(const std::string& path, const ComponentSeries& series) {
    std::ofstream out = open_out(path);
    out << "index,dynamic,diffusive,degenerate\n";
    for (std::size_t p = 0; p < series.times.size(); ++p)
        out << series.times[p] << ',' << format_full(series.dynamic[p]) << ','
            << format_full(series.diffusive[p]) << ',' << int(series.degenerate[p]) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_weights(const std::string& path, const WeightTrack& track) {
    std::ofstream out = open_out(path);
    out << "index";
    for (int i = 1; i <= track.grid.size(); ++i) out << ",w" << i;
    out << '\n';
    for (std::size_t r = 0; r < track.weights.size(); ++r) {
        out << r * track.shift;
        for (double w : track.weights[r]) out << ',' << format_full(w);
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_match_report(const std::string& path, const MatchReport& report) {
    std::ofstream out = open_out(path);
    out << "kind,detected_ms,actual_ms\n";
    for (const auto& [d, a] : report.pairs)
        out << "match," << format_full(d) << ',' << format_full(a) << '\n';
    for (double d : report.false_positives) out << "false_positive," << format_full(d) << ",\n";
    for (double a : report.misses) out << "miss,," << format_full(a) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string format_match_report(const MatchReport& report, double tolerance_ms) {
    std::ostringstream out;
    out << "matched " << report.pairs.size() << ", false positives "
        << report.false_positives.size() << ", misses " << report.misses.size()
        << ", tolerance " << format_full(tolerance_ms) << " ms\n";
    if (!report.pairs.empty())
        out << "mean abs error " << format_full(report.mean_abs_error_ms) << " ms\n";
    for (const auto& [d, a] : report.pairs)
        out << "  match: detected " << format_full(d) << " ms -> actual " << format_full(a)
            << " ms\n";
    for (double d : report.false_positives)
        out << "  false positive: " << format_full(d) << " ms\n";
    for (double a : report.misses) out << "  miss: " << format_full(a) << " ms\n";
    return out.str();
}

}  // namespace mixsep::csv
