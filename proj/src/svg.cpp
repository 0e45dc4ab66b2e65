#include "meshchain/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "meshchain/errors.hpp"

namespace meshchain {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_text(double v) {
    char buf[64];
    const double a = std::fabs(v);
    if (a != 0 && (a >= 1e5 || a < 1e-2)) {
        std::snprintf(buf, sizeof(buf), "%.2g", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", std::round(v * 100) / 100);
    }
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string render_line_chart(const ChartSpec& spec, const std::vector<ChartSeries>& series) {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool any = false;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (!any) {
                x_min = x_max = x;
                y_min = y_max = y;
                any = true;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    }
    if (!any) throw SimError("chart: no points to plot");
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    y_min = std::min(y_min, 0.0);
    if (y_max == y_min) y_max = y_min + 1.0;
    y_max += (y_max - y_min) * 0.08;  // headroom

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    const auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(spec.title) << "</text>\n";

    // axes
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";

    // y ticks
    for (int i = 0; i <= 5; ++i) {
        const double v = y_min + (y_max - y_min) * i / 5.0;
        const double y = py(v);
        out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft
            << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_text(v) << "</text>\n";
    }

    // x ticks: categorical labels when provided, else 5 numeric ticks
    if (!spec.x_tick_labels.empty()) {
        for (size_t i = 0; i < spec.x_tick_labels.size(); ++i) {
            const double x = px(double(i));
            out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << num(x)
                << "\" y2=\"" << kTop + plot_h + 4 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(x) << "\" y=\"" << kTop + plot_h + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << escape(spec.x_tick_labels[i]) << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            const double v = x_min + (x_max - x_min) * i / 5.0;
            const double x = px(v);
            out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << num(x)
                << "\" y2=\"" << kTop + plot_h + 4 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(x) << "\" y=\"" << kTop + plot_h + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << tick_text(v) << "</text>\n";
        }
    }

    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape(spec.x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << escape(spec.y_label)
        << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::ostringstream pts;
        for (const auto& [x, y] : series[si].points) {
            pts << num(px(x)) << "," << num(py(y)) << " ";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << pts.str() << "\"/>\n";
        for (const auto& [x, y] : series[si].points) {
            out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        // legend entry
        const double ly = kTop + 8 + 18 * double(si);
        out << "<line x1=\"" << kLeft + plot_w - 130 << "\" y1=\"" << num(ly) << "\" x2=\""
            << kLeft + plot_w - 106 << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kLeft + plot_w - 100 << "\" y=\"" << num(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[si].label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace meshchain
