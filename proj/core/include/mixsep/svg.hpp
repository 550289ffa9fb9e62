#pragma once

#include <string>
#include <vector>

namespace mixsep::svg {

struct Series {
    std::string label;
    std::string color = "#1f6fb2";
    std::vector<double> y;
    double x0 = 0.0;
    double dx = 1.0;
};

/// Minimal standalone line plot with optional vertical event markers.
void write_line_plot(const std::string& path, const std::vector<Series>& series,
                     const std::vector<double>& marker_x = {}, const std::string& title = "");

}  // namespace mixsep::svg
