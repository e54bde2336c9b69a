#pragma once

#include <optional>
#include <string>
#include <vector>

namespace grpsis::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool line = true;
    bool markers = false;
    std::vector<double> band_low;   // optional shaded band, same length as x
    std::vector<double> band_high;
    std::vector<double> error;      // optional symmetric error bars (half-lengths)
};

Series line_series(std::string label, std::vector<double> x, std::vector<double> y, std::string color,
                   bool dashed = false);
Series marker_series(std::string label, std::vector<double> x, std::vector<double> y, std::string color,
                     bool with_line = false);

/// Horizontal (y = value) or vertical (x = value) dashed reference line.
struct ReferenceLine {
    double value = 0.0;
    bool vertical = false;
    std::string color = "#555555";
    std::string label;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<ReferenceLine> references;
    std::optional<double> y_min;
    std::optional<double> y_max;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

/// Colour for the i-th series of a chart.
std::string palette(std::size_t index);

/// Self-contained SVG document with axes, ticks, legend, bands, error bars and reference lines.
std::string render_svg(const Chart& chart);

void write_svg(const std::string& path, const Chart& chart);

} // namespace grpsis::plot
