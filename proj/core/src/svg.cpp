#include "mixsep/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mixsep/errors.hpp"

namespace mixsep::svg {

namespace {

constexpr double kWidth = 1000.0, kHeight = 320.0, kPad = 40.0;

}  // namespace

void write_line_plot(const std::string& path, const std::vector<Series>& series,
                     const std::vector<double>& marker_x, const std::string& title) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const Series& s : series) {
        if (s.y.empty()) continue;
        x_min = std::min(x_min, s.x0);
        x_max = std::max(x_max, s.x0 + s.dx * static_cast<double>(s.y.size() - 1));
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    for (double m : marker_x) {
        x_min = std::min(x_min, m);
        x_max = std::max(x_max, m);
    }
    if (!(x_min < x_max)) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (!(y_min < y_max)) {
        y_min -= 1.0;
        y_max += 1.0;
    }

    const auto px = [&](double x) { return kPad + (x - x_min) / (x_max - x_min) * (kWidth - 2 * kPad); };
    const auto py = [&](double y) {
        return kHeight - kPad - (y - y_min) / (y_max - y_min) * (kHeight - 2 * kPad);
    };

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << kPad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
            << title << "</text>\n";
    out << "<line x1=\"" << kPad << "\" y1=\"" << kHeight - kPad << "\" x2=\"" << kWidth - kPad
        << "\" y2=\"" << kHeight - kPad << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
        << kHeight - kPad << "\" stroke=\"#444\"/>\n";

    for (double m : marker_x)
        out << "<line x1=\"" << px(m) << "\" y1=\"" << kPad << "\" x2=\"" << px(m) << "\" y2=\""
            << kHeight - kPad << "\" stroke=\"#d0342c\" stroke-dasharray=\"4 3\"/>\n";

    double legend_y = kPad;
    for (const Series& s : series) {
        if (s.y.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double v = std::isfinite(s.y[i]) ? s.y[i] : y_min;
            out << px(s.x0 + s.dx * static_cast<double>(i)) << ',' << py(v) << ' ';
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<text x=\"" << kWidth - kPad - 150 << "\" y=\"" << legend_y
                << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color << "\">"
                << s.label << "</text>\n";
            legend_y += 16.0;
        }
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace mixsep::svg
