#include "spinpointer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace spinpointer {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

}  // namespace

std::string render_svg_chart(const std::string& x_label, const std::string& y_label,
                             const std::vector<ChartSeries>& series, int width,
                             int height) {
    const double ml = 80, mr = 20, mt = 20, mb = 55;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;

    Range rx, ry;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.include(s.x[i]);
            ry.include(s.y[i]);
            if (i < s.yerr.size()) {
                ry.include(s.y[i] - s.yerr[i]);
                ry.include(s.y[i] + s.yerr[i]);
            }
        }
    rx.pad();
    ry.pad();

    auto px = [&](double v) { return ml + pw * (v - rx.lo) / (rx.hi - rx.lo); };
    auto py = [&](double v) { return mt + ph * (1.0 - (v - ry.lo) / (ry.hi - ry.lo)); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes, ticks and grid.
    const int n_ticks = 6;
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (int i = 0; i < n_ticks; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / (n_ticks - 1);
        const double fy = ry.lo + (ry.hi - ry.lo) * i / (n_ticks - 1);
        out << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(mt) << "\" x2=\""
            << num(px(fx)) << "\" y2=\"" << num(mt + ph)
            << "\" stroke=\"#e5e5e5\"/>\n";
        out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py(fy)) << "\" x2=\""
            << num(ml + pw) << "\" y2=\"" << num(py(fy))
            << "\" stroke=\"#e5e5e5\"/>\n";
        out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(mt + ph + 18)
            << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(fy) + 4)
            << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 12)
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << num(mt + ph / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << num(mt + ph / 2)
        << ")\">" << y_label << "</text>\n";
    out << "</g>\n";

    for (const auto& s : series) {
        if (s.line) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
            }
            out << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                if (i < s.yerr.size() && std::isfinite(s.yerr[i])) {
                    out << "<line x1=\"" << num(px(s.x[i])) << "\" y1=\""
                        << num(py(s.y[i] - s.yerr[i])) << "\" x2=\"" << num(px(s.x[i]))
                        << "\" y2=\"" << num(py(s.y[i] + s.yerr[i])) << "\" stroke=\""
                        << s.color << "\"/>\n";
                }
                out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\""
                    << num(py(s.y[i])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
        }
    }

    // Legend.
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    double ly = mt + 14;
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        out << "<rect x=\"" << num(ml + pw - 170) << "\" y=\"" << num(ly - 9)
            << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << num(ml + pw - 154) << "\" y=\"" << num(ly) << "\">"
            << s.label << "</text>\n";
        ly += 18;
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace spinpointer
