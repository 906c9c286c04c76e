#pragma once

#include <string>
#include <vector>

namespace spinpointer {

/// A plottable series: either a polyline or scattered markers with optional
/// symmetric error bars.
struct ChartSeries {
    std::string label;
    std::string color = "#1f6fb2";
    bool line = false;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;  // empty or same length as y
};

/// Writes a minimal static line/scatter chart. Output carries no timestamps,
/// so identical inputs produce identical bytes.
std::string render_svg_chart(const std::string& x_label, const std::string& y_label,
                             const std::vector<ChartSeries>& series,
                             int width = 860, int height = 540);

}  // namespace spinpointer
