#pragma once

// Static SVG heatmaps of a landscape statistic over the (delta, epsilon) grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "landscape.hpp"

namespace anwser {

enum class Statistic { mean, q999 };

namespace detail {

inline std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// Piecewise-linear viridis approximation, t in [0, 1].
inline std::string colour(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84},
                                                                    {59, 82, 139},
                                                                    {33, 145, 140},
                                                                    {94, 201, 98},
                                                                    {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
    const double f = t - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

inline std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }), v.end());
    return v;
}

}  // namespace detail

/// Cells whose status is not ok, or whose value is undefined, are hatched.
inline std::string render_heatmap_svg(const LandscapeTable& table, Statistic stat) {
    std::vector<double> ds, es;
    for (const auto& c : table.cells) {
        ds.push_back(c.delta);
        es.push_back(c.epsilon);
    }
    ds = detail::unique_sorted(ds);
    es = detail::unique_sorted(es);

    auto value = [&](const CellStats& c) { return stat == Statistic::mean ? c.a_mean : c.a_q999; };
    double lo = 1.0, hi = 1.0;
    for (const auto& c : table.cells)
        if (c.status == CellStatus::ok && std::isfinite(value(c))) hi = std::max(hi, value(c));
    if (hi <= lo) hi = lo + 1.0;

    constexpr double cell_px = 36.0, left = 70.0, top = 40.0, bar_w = 20.0;
    const double w = cell_px * static_cast<double>(std::max<std::size_t>(ds.size(), 1));
    const double h = cell_px * static_cast<double>(std::max<std::size_t>(es.size(), 1));
    const double width = left + w + 100.0, height = top + h + 60.0;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt("%.0f", width) + "\" height=\"" +
         detail::fmt("%.0f", height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#999999\" stroke-width=\"2\"/></pattern></defs>\n";
    s += "<text x=\"" + detail::fmt("%.1f", left) + "\" y=\"20\" font-size=\"13\">A (" +
         std::string(stat == Statistic::mean ? "mean" : "0.999 quantile") + ")</text>\n";

    for (const auto& c : table.cells) {
        const auto i = static_cast<double>(std::lower_bound(ds.begin(), ds.end(), c.delta - 1e-12) - ds.begin());
        const auto j = static_cast<double>(std::lower_bound(es.begin(), es.end(), c.epsilon - 1e-12) - es.begin());
        const double x = left + i * cell_px;
        const double y = top + h - (j + 1.0) * cell_px;  // epsilon grows upward
        const double v = value(c);
        const bool defined = c.status == CellStatus::ok && std::isfinite(v);
        const std::string fill = defined ? detail::colour((v - lo) / (hi - lo)) : "url(#hatch)";
        s += "<rect x=\"" + detail::fmt("%.1f", x) + "\" y=\"" + detail::fmt("%.1f", y) + "\" width=\"" +
             detail::fmt("%.1f", cell_px) + "\" height=\"" + detail::fmt("%.1f", cell_px) + "\" fill=\"" + fill +
             "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
        if (defined)
            s += "<text x=\"" + detail::fmt("%.1f", x + cell_px / 2) + "\" y=\"" + detail::fmt("%.1f", y + cell_px / 2 + 4) +
                 "\" text-anchor=\"middle\" font-size=\"9\" fill=\"" + ((v - lo) / (hi - lo) > 0.6 ? "#000000" : "#ffffff") +
                 "\">" + detail::fmt("%.2f", v) + "</text>\n";
    }

    for (std::size_t i = 0; i < ds.size(); ++i)
        s += "<text x=\"" + detail::fmt("%.1f", left + (static_cast<double>(i) + 0.5) * cell_px) + "\" y=\"" +
             detail::fmt("%.1f", top + h + 14) + "\" text-anchor=\"middle\" font-size=\"9\">" +
             detail::fmt("%.2f", ds[i]) + "</text>\n";
    for (std::size_t j = 0; j < es.size(); ++j)
        s += "<text x=\"" + detail::fmt("%.1f", left - 6) + "\" y=\"" +
             detail::fmt("%.1f", top + h - (static_cast<double>(j) + 0.5) * cell_px + 3) +
             "\" text-anchor=\"end\" font-size=\"9\">" + detail::fmt("%.2f", es[j]) + "</text>\n";
    s += "<text x=\"" + detail::fmt("%.1f", left + w / 2) + "\" y=\"" + detail::fmt("%.1f", top + h + 34) +
         "\" text-anchor=\"middle\">delta</text>\n";
    s += "<text x=\"16\" y=\"" + detail::fmt("%.1f", top + h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::fmt("%.1f", top + h / 2) + ")\">epsilon</text>\n";

    const double bx = left + w + 30.0;
    for (int k = 0; k < 20; ++k) {
        const double t = (k + 0.5) / 20.0;
        s += "<rect x=\"" + detail::fmt("%.1f", bx) + "\" y=\"" + detail::fmt("%.2f", top + h - (k + 1) * h / 20.0) +
             "\" width=\"" + detail::fmt("%.1f", bar_w) + "\" height=\"" + detail::fmt("%.2f", h / 20.0 + 0.5) +
             "\" fill=\"" + detail::colour(t) + "\"/>\n";
    }
    s += "<text x=\"" + detail::fmt("%.1f", bx + bar_w + 4) + "\" y=\"" + detail::fmt("%.1f", top + h) + "\">" +
         detail::fmt("%.2f", lo) + "</text>\n";
    s += "<text x=\"" + detail::fmt("%.1f", bx + bar_w + 4) + "\" y=\"" + detail::fmt("%.1f", top + 10) + "\">" +
         detail::fmt("%.2f", hi) + "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace anwser
