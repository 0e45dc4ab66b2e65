#pragma once

#include <string>
#include <vector>

namespace meshchain {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    // Non-empty: categorical x axis, one label per integer x position.
    std::vector<std::string> x_tick_labels;
};

// Static single/multi-series line chart, no external assets.
std::string render_line_chart(const ChartSpec& spec, const std::vector<ChartSeries>& series);

}  // namespace meshchain
