//==============================================================================
// svg.hpp
// Minimal SVG line charts, generated in-process. Optional output; never on
// any computational path.
//==============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fgm {

struct SvgSeries {
    std::vector<double> x, y;
    std::string color = "#1f6fb2";
};

// Plot series on common axes; log-log if requested (non-positive samples are
// skipped there).
inline std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                                  bool loglog = false, int width = 720, int height = 480) {
    const double ml = 60, mr = 20, mt = 34, mb = 42;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double v) { return loglog ? std::log10(v) : v; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (s.x[i] <= 0 || s.y[i] <= 0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, tx(s.y[i]));
            ymax = std::max(ymax, tx(s.y[i]));
        }
    if (!(xmax > xmin)) { xmin = 0; xmax = 1; }
    if (!(ymax > ymin)) { ymin = 0; ymax = 1; }
    const double sx = (width - ml - mr) / (xmax - xmin);
    const double sy = (height - mt - mb) / (ymax - ymin);
    auto px = [&](double v) { return ml + (tx(v) - xmin) * sx; };
    auto py = [&](double v) { return height - mb - (tx(v) - ymin) * sy; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
    out += "<rect x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(mt) + "\" width=\"" +
           std::to_string(width - ml - mr) + "\" height=\"" + std::to_string(height - mt - mb) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";
    char buf[64];
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (s.x[i] <= 0 || s.y[i] <= 0)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            pts += buf;
        }
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
               pts + "\"/>\n";
    }
    std::snprintf(buf, sizeof buf, "%.3g", loglog ? std::pow(10, xmin) : xmin);
    out += "<text x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(height - 20) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + buf + "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", loglog ? std::pow(10, xmax) : xmax);
    out += "<text x=\"" + std::to_string(width - mr) + "\" y=\"" + std::to_string(height - 20) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + buf + "</text>\n";
    out += "</svg>\n";
    return out;
}

} // namespace fgm
