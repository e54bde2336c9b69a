#include "grpsis/plot.hpp"

#include "grpsis/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace grpsis::plot {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double value, int precision = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << value;
    return s.str();
}

std::string tick_label(double value) {
    std::ostringstream s;
    s << value;
    return s.str();
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    const double raw = span / target;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    double step = magnitude;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * magnitude;
        if (span / step <= target) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return ticks;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v, bool log_scale) {
        if (!std::isfinite(v) || (log_scale && v <= 0.0)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi <= lo) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= pad;
            hi += pad;
        }
    }
};

} // namespace

Series line_series(std::string label, std::vector<double> x, std::vector<double> y, std::string color, bool dashed) {
    Series s;
    s.label = std::move(label);
    s.x = std::move(x);
    s.y = std::move(y);
    s.color = std::move(color);
    s.dashed = dashed;
    return s;
}

Series marker_series(std::string label, std::vector<double> x, std::vector<double> y, std::string color,
                     bool with_line) {
    Series s = line_series(std::move(label), std::move(x), std::move(y), std::move(color));
    s.line = with_line;
    s.markers = true;
    return s;
}

std::string palette(std::size_t index) {
    static const char* colors[] = {"#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
    return colors[index % (sizeof colors / sizeof *colors)];
}

std::string render_svg(const Chart& chart) {
    Range xr;
    Range yr;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.add(s.x[i], false);
            yr.add(s.y[i], chart.log_y);
            if (!s.band_low.empty()) {
                yr.add(s.band_low[i], chart.log_y);
                yr.add(s.band_high[i], chart.log_y);
            }
            if (!s.error.empty()) {
                yr.add(s.y[i] - s.error[i], chart.log_y);
                yr.add(s.y[i] + s.error[i], chart.log_y);
            }
        }
    }
    for (const auto& ref : chart.references) (ref.vertical ? xr : yr).add(ref.value, !ref.vertical && chart.log_y);
    xr.finish();
    yr.finish();
    if (chart.y_min) yr.lo = *chart.y_min;
    if (chart.y_max) yr.hi = *chart.y_max;

    const double plot_w = chart.width - kLeft - kRight;
    const double plot_h = chart.height - kTop - kBottom;
    auto ymap = [&](double y) {
        if (chart.log_y) {
            const double v = std::log10(std::max(y, yr.lo));
            return kTop + plot_h * (1.0 - (v - std::log10(yr.lo)) / (std::log10(yr.hi) - std::log10(yr.lo)));
        }
        return kTop + plot_h * (1.0 - (y - yr.lo) / (yr.hi - yr.lo));
    };
    auto xmap = [&](double x) { return kLeft + plot_w * (x - xr.lo) / (xr.hi - xr.lo); };

    std::ostringstream svg;
    svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << chart.width << R"(" height=")" << chart.height
        << R"(" font-family="sans-serif" font-size="12">)" << '\n';
    svg << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    svg << R"(<text x=")" << fixed(kLeft + plot_w / 2) << R"(" y="22" text-anchor="middle" font-size="14">)"
        << escape(chart.title) << "</text>\n";
    svg << "<defs><clipPath id=\"plot\"><rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\""
        << fixed(plot_w) << "\" height=\"" << fixed(plot_h) << "\"/></clipPath></defs>\n";

    // Ticks and grid.
    for (double t : nice_ticks(xr.lo, xr.hi)) {
        const double x = xmap(t);
        svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(x) << "\" y2=\""
            << fixed(kTop + plot_h) << "\" stroke=\"#eeeeee\"/>\n";
        svg << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    std::vector<double> yticks;
    if (chart.log_y) {
        for (double e = std::floor(std::log10(yr.lo)); e <= std::ceil(std::log10(yr.hi)); e += 1.0) {
            const double t = std::pow(10.0, e);
            if (t >= yr.lo * (1 - 1e-9) && t <= yr.hi * (1 + 1e-9)) yticks.push_back(t);
        }
    } else {
        yticks = nice_ticks(yr.lo, yr.hi);
    }
    for (double t : yticks) {
        const double y = ymap(t);
        svg << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kLeft + plot_w)
            << "\" y2=\"" << fixed(y) << "\" stroke=\"#eeeeee\"/>\n";
        svg << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    svg << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(plot_w)
        << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(chart.height - 12.0)
        << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << fixed(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(chart.y_label) << "</text>\n";

    svg << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& s : chart.series) {
        if (s.band_low.size() == s.x.size() && s.band_high.size() == s.x.size() && !s.x.empty()) {
            svg << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) svg << fixed(xmap(s.x[i])) << ',' << fixed(ymap(s.band_high[i])) << ' ';
            for (std::size_t i = s.x.size(); i-- > 0;) svg << fixed(xmap(s.x[i])) << ',' << fixed(ymap(s.band_low[i])) << ' ';
            svg << "\"/>\n";
        }
    }
    for (const auto& ref : chart.references) {
        const bool v = ref.vertical;
        const double a = v ? xmap(ref.value) : ymap(ref.value);
        svg << "<line x1=\"" << fixed(v ? a : kLeft) << "\" y1=\"" << fixed(v ? kTop : a) << "\" x2=\""
            << fixed(v ? a : kLeft + plot_w) << "\" y2=\"" << fixed(v ? kTop + plot_h : a) << "\" stroke=\""
            << ref.color << "\" stroke-dasharray=\"6,4\"/>\n";
    }
    for (const auto& s : chart.series) {
        if (s.line && s.x.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
            if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
            svg << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (chart.log_y && s.y[i] <= 0.0) continue;
                svg << fixed(xmap(s.x[i])) << ',' << fixed(ymap(s.y[i])) << ' ';
            }
            svg << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.error.size() && i < s.x.size(); ++i) {
            const double x = xmap(s.x[i]);
            svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(ymap(s.y[i] - s.error[i])) << "\" x2=\"" << fixed(x)
                << "\" y2=\"" << fixed(ymap(s.y[i] + s.error[i])) << "\" stroke=\"" << s.color << "\"/>\n";
        }
        if (s.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << "<circle cx=\"" << fixed(xmap(s.x[i])) << "\" cy=\"" << fixed(ymap(s.y[i]))
                    << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    svg << "</g>\n";

    double legend_y = kTop + 10;
    const double legend_x = kLeft + plot_w + 12;
    auto legend_entry = [&](const std::string& label, const std::string& color, bool dashed) {
        svg << "<line x1=\"" << fixed(legend_x) << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << fixed(legend_x + 22)
            << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
            << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        svg << "<text x=\"" << fixed(legend_x + 28) << "\" y=\"" << fixed(legend_y + 4) << "\">" << escape(label)
            << "</text>\n";
        legend_y += 18;
    };
    for (const auto& s : chart.series)
        if (!s.label.empty()) legend_entry(s.label, s.color, s.dashed);
    for (const auto& ref : chart.references)
        if (!ref.label.empty()) legend_entry(ref.label, ref.color, true);
    svg << "</svg>\n";
    return svg.str();
}

void write_svg(const std::string& path, const Chart& chart) {
    const std::string document = render_svg(chart);
    write_file(path, [&](std::ostream& out) { out << document; });
}

} // namespace grpsis::plot
