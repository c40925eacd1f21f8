// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Static SVG rendering of delta series. Series are grouped by category
// into vertically stacked panels (cpu, memory, disk, network) with one
// polyline per series, axis ticks, and a legend. Output is deterministic:
// fixed coordinate precision, no timestamps or randomness in the markup.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "resprof/analysis.hpp"
#include "resprof/error.hpp"
#include "resprof/ini.hpp"

namespace resprof {

struct PlotStyle {
    int width = 900;         // full image width, px
    int panel_height = 240;  // per-panel height, px
    int margin_left = 80;
    int margin_right = 150; // leaves room for the legend
    int margin_top = 34;
    int margin_bottom = 34;
    std::string background = "#ffffff";
    std::string grid_color = "#d8d8d8";
    std::string text_color = "#222222";
    std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                        "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    bool relative_time = true; // x axis in seconds since the first sample

    bool operator==(const PlotStyle&) const = default;
};

/// Style file: a single [plot] section; unknown keys are rejected so typos
/// surface instead of silently falling back to defaults.
inline PlotStyle parse_plot_style(std::string_view doc) {
    PlotStyle style;
    IniDocument ini = parse_ini(doc);
    const IniSection* section = ini.find("plot");
    if (!section) throw ConfigError("style file has no [plot] section");
    for (const auto& entry : section->entries) {
        auto int_value = [&]() {
            auto v = text::to_u64(entry.value);
            if (!v || *v == 0 || *v > 100000)
                throw ConfigError("style key '" + entry.key + "': invalid size '" + entry.value + "'");
            return static_cast<int>(*v);
        };
        if (entry.key == "width") style.width = int_value();
        else if (entry.key == "panel_height") style.panel_height = int_value();
        else if (entry.key == "background") style.background = entry.value;
        else if (entry.key == "grid_color") style.grid_color = entry.value;
        else if (entry.key == "text_color") style.text_color = entry.value;
        else if (entry.key == "relative_time") {
            if (entry.value == "true") style.relative_time = true;
            else if (entry.value == "false") style.relative_time = false;
            else throw ConfigError("style key 'relative_time': expected true or false");
        } else if (entry.key == "palette") {
            style.palette.clear();
            for (std::string_view color : text::split_ws(entry.value))
                style.palette.emplace_back(color);
            if (style.palette.empty()) throw ConfigError("style key 'palette': no colors given");
        } else {
            throw ConfigError("style file: unknown key '" + entry.key + "'");
        }
    }
    return style;
}

namespace plotdetail {

inline std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmt_label(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Panel {
    std::string category;
    std::vector<const DeltaSeries*> series;
};

/// Panels in order of first appearance, one per category, holding only
/// series that actually have points.
inline std::vector<Panel> group_panels(const DeltaResult& result) {
    std::vector<Panel> panels;
    for (const auto& s : result.series) {
        if (s.points.empty()) continue;
        Panel* panel = nullptr;
        for (auto& p : panels)
            if (p.category == s.category) { panel = &p; break; }
        if (!panel) {
            panels.push_back({s.category, {}});
            panel = &panels.back();
        }
        panel->series.push_back(&s);
    }
    return panels;
}

} // namespace plotdetail

/// Render the delta series as one SVG document with a panel per category.
/// A result with no plottable points still yields a valid SVG that says so.
inline std::string render_svg(const DeltaResult& result, const PlotStyle& style,
                              const std::string& title = "") {
    using plotdetail::escape_xml;
    using plotdetail::fmt2;
    using plotdetail::fmt_label;

    const auto panels = plotdetail::group_panels(result);
    const int panel_count = panels.empty() ? 1 : static_cast<int>(panels.size());
    const int total_height = style.panel_height * panel_count;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
           "\" height=\"" + std::to_string(total_height) + "\" viewBox=\"0 0 " +
           std::to_string(style.width) + " " + std::to_string(total_height) + "\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
           std::to_string(total_height) + "\" fill=\"" + style.background + "\"/>\n";

    if (panels.empty()) {
        svg += "  <text x=\"" + std::to_string(style.width / 2) + "\" y=\"" +
               std::to_string(total_height / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\" fill=\"" + style.text_color + "\">no data points</text>\n";
        svg += "</svg>\n";
        return svg;
    }

    double t_min = 0, t_max = 0;
    bool first_point = true;
    for (const auto& panel : panels)
        for (const DeltaSeries* s : panel.series)
            for (const auto& p : s->points) {
                if (first_point) {
                    t_min = t_max = p.wall_clock;
                    first_point = false;
                } else {
                    t_min = std::min(t_min, p.wall_clock);
                    t_max = std::max(t_max, p.wall_clock);
                }
            }
    const double t_base = style.relative_time ? t_min : 0.0;
    double t_span = t_max - t_min;
    if (t_span <= 0) t_span = 1;

    const int plot_w = style.width - style.margin_left - style.margin_right;
    const int plot_h = style.panel_height - style.margin_top - style.margin_bottom;

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const int top = static_cast<int>(pi) * style.panel_height;
        svg += "  <g transform=\"translate(0," + std::to_string(top) + ")\">\n";

        double y_min = 0, y_max = 0;
        bool first = true;
        for (const DeltaSeries* s : panel.series)
            for (const auto& p : s->points) {
                if (first) {
                    y_min = y_max = p.value;
                    first = false;
                } else {
                    y_min = std::min(y_min, p.value);
                    y_max = std::max(y_max, p.value);
                }
            }
        y_min = std::min(y_min, 0.0); // keep the zero line in frame
        double y_span = y_max - y_min;
        if (y_span <= 0) {
            y_span = y_max != 0 ? std::abs(y_max) : 1;
            y_max = y_min + y_span;
        }

        auto x_of = [&](double t) {
            return style.margin_left + (t - t_min) / t_span * plot_w;
        };
        auto y_of = [&](double v) {
            return style.margin_top + (1.0 - (v - y_min) / y_span) * plot_h;
        };

        std::string panel_title = panel.category;
        if (!title.empty() && pi == 0) panel_title = title + " : " + panel_title;
        svg += "    <text x=\"" + std::to_string(style.margin_left) + "\" y=\"20\" "
               "font-family=\"sans-serif\" font-size=\"14\" fill=\"" + style.text_color + "\">" +
               escape_xml(panel_title) + "</text>\n";

        // grid and ticks: 4 horizontal, 5 vertical divisions
        for (int gy = 0; gy <= 4; ++gy) {
            const double v = y_min + (y_max - y_min) * gy / 4.0;
            const double y = y_of(v);
            svg += "    <line x1=\"" + std::to_string(style.margin_left) + "\" y1=\"" + fmt2(y) +
                   "\" x2=\"" + std::to_string(style.margin_left + plot_w) + "\" y2=\"" + fmt2(y) +
                   "\" stroke=\"" + style.grid_color + "\" stroke-width=\"1\"/>\n";
            svg += "    <text x=\"" + std::to_string(style.margin_left - 6) + "\" y=\"" + fmt2(y + 4) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" +
                   style.text_color + "\">" + fmt_label(v) + "</text>\n";
        }
        for (int gx = 0; gx <= 5; ++gx) {
            const double t = t_min + t_span * gx / 5.0;
            const double x = x_of(t);
            svg += "    <line x1=\"" + fmt2(x) + "\" y1=\"" + std::to_string(style.margin_top) +
                   "\" x2=\"" + fmt2(x) + "\" y2=\"" + std::to_string(style.margin_top + plot_h) +
                   "\" stroke=\"" + style.grid_color + "\" stroke-width=\"1\"/>\n";
            svg += "    <text x=\"" + fmt2(x) + "\" y=\"" +
                   std::to_string(style.margin_top + plot_h + 16) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" +
                   style.text_color + "\">" + fmt_label(t - t_base) + "</text>\n";
        }

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const DeltaSeries& s = *panel.series[si];
            const std::string& color = style.palette[si % style.palette.size()];
            if (s.points.size() >= 2) {
                std::string points;
                for (const auto& p : s.points) {
                    if (!points.empty()) points += ' ';
                    points += fmt2(x_of(p.wall_clock)) + "," + fmt2(y_of(p.value));
                }
                svg += "    <polyline fill=\"none\" stroke=\"" + color +
                       "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
            }
            if (s.points.size() <= 100) {
                for (const auto& p : s.points)
                    svg += "    <circle cx=\"" + fmt2(x_of(p.wall_clock)) + "\" cy=\"" +
                           fmt2(y_of(p.value)) + "\" r=\"2\" fill=\"" + color + "\"/>\n";
            }
            const int ly = style.margin_top + 14 * static_cast<int>(si);
            const int lx = style.margin_left + plot_w + 10;
            svg += "    <rect x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly) +
                   "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
            svg += "    <text x=\"" + std::to_string(lx + 14) + "\" y=\"" + std::to_string(ly + 9) +
                   "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + style.text_color + "\">" +
                   escape_xml(s.name) + "</text>\n";
        }
        svg += "  </g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace resprof
