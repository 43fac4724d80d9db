#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "nigrid/errors.hpp"

namespace nigrid {

/// One polyline in a plot.
struct LineSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

/// Minimal static SVG line plot: axes, tick labels, legend, one polyline
/// per series.
inline void write_svg_plot(std::ostream& out, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<LineSeries>& series) {
    constexpr double width = 840.0, height = 480.0;
    constexpr double ml = 70.0, mr = 160.0, mt = 40.0, mb = 50.0;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw DimensionError("series x/y size mismatch");
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (!(x_min < x_max)) x_max = x_min + 1.0;
    if (!(y_min < y_max)) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto to_px = [&](double x, double y) {
        const double px = ml + (x - x_min) / (x_max - x_min) * plot_w;
        const double py = mt + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
        return std::pair<double, double>{px, py};
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << (ml + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // frame and ticks
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    constexpr int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / n_ticks;
        const double fy = y_min + (y_max - y_min) * i / n_ticks;
        const auto [px, _] = to_px(fx, y_min);
        const auto [__, py] = to_px(x_min, fy);
        out << "<line x1=\"" << px << "\" y1=\"" << (mt + plot_h) << "\" x2=\"" << px
            << "\" y2=\"" << (mt + plot_h + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << (mt + plot_h + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::svg_num(fx) << "</text>\n";
        out << "<line x1=\"" << (ml - 5) << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\""
            << py << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << (ml - 8) << "\" y=\"" << (py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::svg_num(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + plot_w / 2) << "\" y=\"" << (height - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << (mt + plot_h / 2) << ")\">" << y_label
        << "</text>\n";

    // series, decimated to at most ~2000 points each
    for (const auto& s : series) {
        const size_t count = s.x.size();
        const size_t step = std::max<size_t>(1, count / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\"";
        if (s.dashed) out << " stroke-dasharray=\"6,4\"";
        out << " points=\"";
        for (size_t i = 0; i < count; i += step) {
            const auto [px, py] = to_px(s.x[i], s.y[i]);
            out << detail::svg_num(px) << ',' << detail::svg_num(py) << ' ';
        }
        if (count > 0 && (count - 1) % step != 0) {
            const auto [px, py] = to_px(s.x[count - 1], s.y[count - 1]);
            out << detail::svg_num(px) << ',' << detail::svg_num(py);
        }
        out << "\"/>\n";
    }

    // legend
    double ly = mt + 10.0;
    for (const auto& s : series) {
        out << "<line x1=\"" << (ml + plot_w + 10) << "\" y1=\"" << ly << "\" x2=\""
            << (ml + plot_w + 34) << "\" y2=\"" << ly << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"";
        if (s.dashed) out << " stroke-dasharray=\"6,4\"";
        out << "/>\n";
        out << "<text x=\"" << (ml + plot_w + 40) << "\" y=\"" << (ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        ly += 18.0;
    }
    out << "</svg>\n";
}

}  // namespace nigrid
