#pragma once

#include <string>
#include <vector>

namespace sislab {

/// One curve: equal-length x and y samples drawn as a single polyline.
struct SvgSeries {
    std::string label;
    std::string color; // CSS stroke color, e.g. "#1f77b4"
    std::vector<double> x;
    std::vector<double> y;
};

/// One coordinate frame with title, axis labels, ticks, and a legend.
struct SvgPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
};

/// Renders the panels side by side into a standalone SVG document.  The
/// output is a pure function of the input — fixed viewBox per panel count,
/// fixed coordinate formatting, ticks chosen at 1/2/5 x 10^k multiples from
/// the data range — so identical input yields byte-identical bytes.  Each
/// series becomes exactly one <polyline>.  Empty panels, empty series,
/// length mismatches, and non-finite samples are ValidationErrors.
std::string render_svg(const std::vector<SvgPanel>& panels);

} // namespace sislab
