#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "extlab/errors.hpp"
#include "extlab/io/csv.hpp"

namespace extlab {

enum class PlotKind { NormDecay, Dichotomy };

namespace detail {

struct Panel {
    double x0, y0, w, h;       // pixel box of the plotting area
    double xlo, xhi, ylo, yhi; // data range in plot coordinates
    bool logx = false, logy = true;

    double px(double x) const { return x0 + (x - xlo) / (xhi - xlo) * w; }
    double py(double y) const { return y0 + h - (y - ylo) / (yhi - ylo) * h; }
};

inline std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline double nice_step(double span) {
    const double raw = span / 4.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return mag * (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0);
}

// Tick positions in plot coordinates plus their labels in data units.
inline std::vector<std::pair<double, std::string>> make_ticks(double lo, double hi,
                                                              bool log_axis) {
    std::vector<std::pair<double, std::string>> ticks;
    if (log_axis) {
        for (int k = static_cast<int>(std::ceil(lo)); k <= std::floor(hi); ++k)
            ticks.push_back({static_cast<double>(k), "1e" + std::to_string(k)});
        if (ticks.size() >= 2)
            return ticks;
        ticks.clear();
    }
    const double step = nice_step(hi - lo);
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
        ticks.push_back({t, fmt_label(log_axis ? std::pow(10.0, t) : t)});
    return ticks;
}

struct Curve {
    std::string color;
    std::string name;
    std::vector<std::pair<double, double>> pts; // already in plot coordinates
};

inline void render_panel(std::string& svg, Panel& panel,
                         const std::vector<Curve>& curves,
                         const std::string& xlabel, const std::string& ylabel) {
    // data ranges over all curves, padded a little so traces stay inside
    panel.xlo = panel.ylo = 1e300;
    panel.xhi = panel.yhi = -1e300;
    for (const auto& c : curves)
        for (const auto& [x, y] : c.pts) {
            panel.xlo = std::min(panel.xlo, x);
            panel.xhi = std::max(panel.xhi, x);
            panel.ylo = std::min(panel.ylo, y);
            panel.yhi = std::max(panel.yhi, y);
        }
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double eps = span > 0.0 ? 0.04 * span : std::max(1.0, std::abs(lo));
        lo -= eps;
        hi += eps;
    };
    pad(panel.xlo, panel.xhi);
    pad(panel.ylo, panel.yhi);

    svg += "<rect x=\"" + fmt_px(panel.x0) + "\" y=\"" + fmt_px(panel.y0) +
           "\" width=\"" + fmt_px(panel.w) + "\" height=\"" + fmt_px(panel.h) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    for (const auto& [t, label] : make_ticks(panel.xlo, panel.xhi, panel.logx)) {
        const double x = panel.px(t);
        svg += "<line x1=\"" + fmt_px(x) + "\" y1=\"" + fmt_px(panel.y0 + panel.h) +
               "\" x2=\"" + fmt_px(x) + "\" y2=\"" + fmt_px(panel.y0 + panel.h + 5) +
               "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(panel.y0 + panel.h + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + label + "</text>\n";
    }
    for (const auto& [t, label] : make_ticks(panel.ylo, panel.yhi, panel.logy)) {
        const double y = panel.py(t);
        svg += "<line x1=\"" + fmt_px(panel.x0 - 5) + "\" y1=\"" + fmt_px(y) +
               "\" x2=\"" + fmt_px(panel.x0) + "\" y2=\"" + fmt_px(y) +
               "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt_px(panel.x0 - 8) + "\" y=\"" + fmt_px(y + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + label + "</text>\n";
    }
    svg += "<text x=\"" + fmt_px(panel.x0 + 0.5 * panel.w) + "\" y=\"" +
           fmt_px(panel.y0 + panel.h + 36) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + xlabel + "</text>\n";
    svg += "<text x=\"" + fmt_px(panel.x0 - 52) + "\" y=\"" +
           fmt_px(panel.y0 + 0.5 * panel.h) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " +
           fmt_px(panel.x0 - 52) + " " + fmt_px(panel.y0 + 0.5 * panel.h) + ")\">" +
           ylabel + "</text>\n";

    double legend_y = panel.y0 + 16;
    for (const auto& c : curves) {
        std::string pts;
        for (const auto& [x, y] : c.pts) {
            if (!pts.empty())
                pts += ' ';
            pts += fmt_px(panel.px(x)) + "," + fmt_px(panel.py(y));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + c.color +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (!c.name.empty()) {
            svg += "<text x=\"" + fmt_px(panel.x0 + panel.w - 10) + "\" y=\"" +
                   fmt_px(legend_y) + "\" font-size=\"11\" text-anchor=\"end\" fill=\"" +
                   c.color + "\">" + c.name + "</text>\n";
            legend_y += 14;
        }
    }
}

inline Curve collect(const CsvTable& series, std::size_t xcol, std::size_t ycol,
                     bool logx, bool logy, std::string color, std::string name) {
    Curve c{std::move(color), std::move(name), {}};
    for (const auto& row : series.rows) {
        const double x = parse_real(row[xcol]);
        const double y = parse_real(row[ycol]);
        if ((logx && !(x > 0.0)) || (logy && !(y > 0.0)))
            continue;
        c.pts.push_back({logx ? std::log10(x) : x, logy ? std::log10(y) : y});
    }
    return c;
}

} // namespace detail

// Static plot of a persisted series.  NormDecay takes any table whose first
// column is time and second a positive norm, drawn semilog-y.  Dichotomy takes
// the s,X,Y,Z mode series and draws two panels, semilog-y and log-log.  Output
// depends on nothing but the input bytes, so repeated runs agree byte for byte.
inline void emit_plot(const CsvTable& series, PlotKind kind,
                      const std::filesystem::path& path) {
    if (series.rows.empty())
        throw EmptySeries("no rows to plot");

    std::string body;
    double width = 600, height = 430;
    if (kind == PlotKind::NormDecay) {
        if (series.header.size() < 2)
            throw SchemaMismatch("norm plot needs at least two columns");
        detail::Curve c = detail::collect(series, 0, 1, false, true, "#1f77b4",
                                          series.header[1]);
        if (c.pts.empty())
            throw EmptySeries("no positive values to plot");
        detail::Panel panel{80, 30, 490, 340};
        detail::render_panel(body, panel, {c}, series.header[0],
                             "log10 " + series.header[1]);
    } else {
        require_header(series, {"s", "X", "Y", "Z"}, "modeseries");
        const char* colors[3] = {"#d62728", "#2ca02c", "#1f77b4"};
        const char* names[3] = {"X", "Y", "Z"};
        width = 1180;
        bool drew = false;
        for (int p = 0; p < 2; ++p) {
            const bool logx = p == 1;
            std::vector<detail::Curve> curves;
            for (std::size_t j = 0; j < 3; ++j) {
                auto c = detail::collect(series, 0, j + 1, logx, true, colors[j],
                                         names[j]);
                if (!c.pts.empty())
                    curves.push_back(std::move(c));
            }
            if (curves.empty())
                continue;
            drew = true;
            detail::Panel panel{80 + 580.0 * p, 30, 490, 340};
            panel.logx = logx;
            detail::render_panel(body, panel, curves, logx ? "log10 s" : "s",
                                 "log10 value");
        }
        if (!drew)
            throw EmptySeries("no positive values to plot");
    }

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      detail::fmt_px(width) + "\" height=\"" + detail::fmt_px(height) +
                      "\" viewBox=\"0 0 " + detail::fmt_px(width) + " " +
                      detail::fmt_px(height) + "\">\n<rect width=\"100%\" " +
                      "height=\"100%\" fill=\"#ffffff\"/>\n" + body + "</svg>\n";

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw SchemaMismatch("cannot open for writing: " + tmp.string());
        out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    }
    std::filesystem::rename(tmp, path);
}

} // namespace extlab
