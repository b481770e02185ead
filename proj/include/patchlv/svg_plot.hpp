#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "patchlv/csv.hpp"

namespace patchlv {

/// Hand-rolled SVG line plots, rendered from the exported CSV artifacts so
/// the files on disk are the single source of truth. Everything is computed
/// from the data with fixed formatting (%.2f pixel coordinates, %.6g tick
/// labels, fixed palette), so identical inputs reproduce the image byte for
/// byte.

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

namespace detail {

inline const char* plot_color(std::size_t i) {
    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        ticks.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return ticks;
}

}  // namespace detail

/// Core renderer. `markers` are data-space points drawn as open circles on
/// top of the series (used to flag accepted scan candidates).
inline std::string render_line_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec,
                                    const std::vector<std::pair<double, double>>& markers = {}) {
    constexpr double width = 960.0, height = 540.0;
    constexpr double ml = 80.0, mr = 24.0, mt = 48.0, mb = 56.0;
    constexpr double log_floor = 1e-16;

    const auto transform_y = [&](double v) {
        return spec.log_y ? std::log10(std::max(v, log_floor)) : v;
    };

    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool any = false;
    const auto fold = [&](double x, double ty) {
        if (!any) {
            x_lo = x_hi = x;
            y_lo = y_hi = ty;
            any = true;
        } else {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, ty);
            y_hi = std::max(y_hi, ty);
        }
    };
    for (const PlotSeries& s : series)
        for (const auto& [x, y] : s.points) fold(x, transform_y(y));
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) {
        y_lo -= 1.0;
        y_hi += 1.0;
    } else {
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }

    const auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr); };
    const auto py_t = [&](double ty) {
        return height - mb - (ty - y_lo) / (y_hi - y_lo) * (height - mt - mb);
    };
    const auto py = [&](double y) { return py_t(transform_y(y)); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"540\" "
           "viewBox=\"0 0 960 540\">\n";
    svg += "<rect width=\"960\" height=\"540\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"480\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"17\" fill=\"#202020\">" +
           spec.title + "</text>\n";

    for (double tx : detail::linear_ticks(x_lo, x_hi)) {
        const std::string x = detail::fmt_px(px(tx));
        svg += "<line x1=\"" + x + "\" y1=\"" + detail::fmt_px(mt) + "\" x2=\"" + x + "\" y2=\"" +
               detail::fmt_px(height - mb) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + detail::fmt_px(height - mb + 18.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#404040\">" +
               format_short(tx) + "</text>\n";
    }
    std::vector<double> y_ticks;
    if (spec.log_y) {
        for (double d = std::ceil(y_lo); d <= std::floor(y_hi) + 1e-9; d += 1.0)
            y_ticks.push_back(d);
    } else {
        y_ticks = detail::linear_ticks(y_lo, y_hi);
    }
    for (double ty : y_ticks) {
        const std::string y = detail::fmt_px(py_t(ty));
        svg += "<line x1=\"" + detail::fmt_px(ml) + "\" y1=\"" + y + "\" x2=\"" +
               detail::fmt_px(width - mr) + "\" y2=\"" + y +
               "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        const std::string label = spec.log_y ? ("1e" + format_short(ty)) : format_short(ty);
        svg += "<text x=\"" + detail::fmt_px(ml - 8.0) + "\" y=\"" + detail::fmt_px(py_t(ty) + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#404040\">" +
               label + "</text>\n";
    }

    svg += "<rect x=\"" + detail::fmt_px(ml) + "\" y=\"" + detail::fmt_px(mt) + "\" width=\"" +
           detail::fmt_px(width - ml - mr) + "\" height=\"" + detail::fmt_px(height - mt - mb) +
           "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt_px((ml + width - mr) / 2.0) + "\" y=\"" +
           detail::fmt_px(height - 12.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "fill=\"#202020\">" +
           spec.x_label + "</text>\n";
    svg += "<text x=\"20\" y=\"" + detail::fmt_px((mt + height - mb) / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "fill=\"#202020\" transform=\"rotate(-90 20 " +
           detail::fmt_px((mt + height - mb) / 2.0) + ")\">" + spec.y_label + "</text>\n";

    // Series polylines; log scale skips nonpositive values.
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::string points;
        for (const auto& [x, y] : series[i].points) {
            if (spec.log_y && !(y > 0.0)) continue;
            points += detail::fmt_px(px(x)) + "," + detail::fmt_px(py(y)) + " ";
        }
        if (!points.empty()) points.pop_back();
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(detail::plot_color(i)) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    }

    for (const auto& [x, y] : markers) {
        svg += "<circle cx=\"" + detail::fmt_px(px(x)) + "\" cy=\"" + detail::fmt_px(py(y)) +
               "\" r=\"4\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    }

    // Legend, top-right inside the frame; capped so overlays stay readable.
    const std::size_t legend_rows = std::min<std::size_t>(series.size(), 12);
    for (std::size_t i = 0; i < legend_rows; ++i) {
        const double ly = mt + 18.0 + 16.0 * static_cast<double>(i);
        svg += "<line x1=\"" + detail::fmt_px(width - mr - 160.0) + "\" y1=\"" +
               detail::fmt_px(ly - 4.0) + "\" x2=\"" + detail::fmt_px(width - mr - 132.0) +
               "\" y2=\"" + detail::fmt_px(ly - 4.0) + "\" stroke=\"" +
               std::string(detail::plot_color(i)) + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + detail::fmt_px(width - mr - 126.0) + "\" y=\"" + detail::fmt_px(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#202020\">" +
               series[i].label + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

inline const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{"t", "x1", "y1", "x2", "y2"};
    return cols;
}

/// Four-line time-series plot from one trajectory CSV.
inline std::string trajectory_plot_svg(const CsvTable& table, const std::string& title) {
    expect_columns(table, trajectory_columns(), "trajectory plot");
    std::vector<PlotSeries> series(4);
    for (std::size_t i = 0; i < 4; ++i) {
        series[i].label = table.columns[i + 1];
        series[i].points.reserve(table.rows.size());
    }
    for (const auto& row : table.rows)
        for (std::size_t i = 0; i < 4; ++i) series[i].points.emplace_back(row[0], row[i + 1]);
    return render_line_plot(series, {title, "t", "density", false});
}

/// Overlay of several trajectory CSVs (one per initial state), showing the
/// trajectories merging.
inline std::string overlay_plot_svg(const std::vector<CsvTable>& tables,
                                    const std::string& title) {
    if (tables.empty()) throw CsvError("overlay plot: needs at least one trajectory table");
    std::vector<PlotSeries> series;
    for (std::size_t k = 0; k < tables.size(); ++k) {
        const CsvTable& table = tables[k];
        expect_columns(table, trajectory_columns(), "overlay plot");
        for (std::size_t i = 0; i < 4; ++i) {
            PlotSeries s;
            s.label = "ic" + std::to_string(k) + "." + table.columns[i + 1];
            s.points.reserve(table.rows.size());
            for (const auto& row : table.rows) s.points.emplace_back(row[0], row[i + 1]);
            series.push_back(std::move(s));
        }
    }
    return render_line_plot(series, {title, "t", "density", false});
}

/// Defect-vs-shift curve with accepted candidates circled.
inline std::string scan_plot_svg(const CsvTable& table, const std::string& title) {
    static const std::vector<std::string> cols{"T", "defect", "accepted"};
    expect_columns(table, cols, "scan plot");
    PlotSeries curve{"defect", {}};
    curve.points.reserve(table.rows.size());
    std::vector<std::pair<double, double>> markers;
    for (const auto& row : table.rows) {
        curve.points.emplace_back(row[0], row[1]);
        if (row[2] != 0.0) markers.emplace_back(row[0], row[1]);
    }
    return render_line_plot({curve}, {title, "shift T", "defect", false}, markers);
}

/// Pairwise sup-difference curves (log scale) from a diff CSV.
inline std::string diff_plot_svg(const CsvTable& table, const std::string& title) {
    if (table.columns.size() < 2 || table.columns[0] != "t")
        throw CsvError("diff plot: expected columns t,d_i_j,...");
    std::vector<PlotSeries> series(table.columns.size() - 1);
    for (std::size_t i = 1; i < table.columns.size(); ++i) {
        if (table.columns[i].rfind("d_", 0) != 0)
            throw CsvError("diff plot: expected columns t,d_i_j,...");
        series[i - 1].label = table.columns[i];
        series[i - 1].points.reserve(table.rows.size());
    }
    for (const auto& row : table.rows)
        for (std::size_t i = 1; i < table.columns.size(); ++i)
            series[i - 1].points.emplace_back(row[0], row[i]);
    return render_line_plot(series, {title, "t", "sup-norm difference", true});
}

}  // namespace patchlv
