#pragma once

#include <string>
#include <vector>

namespace psocp::app {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool markers = false;  // circles at the points instead of a line
    bool dashed = false;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool equal_axes = false;  // same scale on x and y
};

/// Static line chart as a standalone SVG document. Non-finite points are skipped.
[[nodiscard]] std::string render_svg(const Figure& fig);

}  // namespace psocp::app
