#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bintex/dataset.hpp"

namespace bintex {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

inline std::vector<ScatterPoint> scatter_data(const FeatureTable& table,
                                              const std::string& x_feature,
                                              const std::string& y_feature) {
    for (const auto* name : {&x_feature, &y_feature}) {
        if (std::find(table.schema.begin(), table.schema.end(), *name) == table.schema.end())
            throw std::invalid_argument("unknown feature: " + *name);
    }
    std::vector<ScatterPoint> points;
    points.reserve(table.size());
    for (const auto& rec : table.records) {
        ScatterPoint p;
        p.x = rec.value(x_feature);
        p.y = rec.value(y_feature);
        p.label = table.label_of(rec);
        points.push_back(std::move(p));
    }
    return points;
}

inline std::string scatter_csv(const std::vector<ScatterPoint>& points,
                               const std::string& x_name, const std::string& y_name) {
    std::string out = x_name + "," + y_name + ",label\n";
    for (const auto& p : points) {
        out += format_value(p.x);
        out += ',';
        out += format_value(p.y);
        out += ',';
        out += p.label;
        out += '\n';
    }
    return out;
}

namespace detail {

// 12 well-separated fills, reused cyclically past 12 classes.
inline const std::array<const char*, 12>& scatter_palette() {
    static const std::array<const char*, 12> palette = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
        "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    };
    return palette;
}

inline std::string svg_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string axis_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
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

} // namespace detail

/// 640x480 SVG scatter plot: one colour per class (sorted label order),
/// axis titles, min/max tick labels, legend in the top-right corner.
inline std::string scatter_svg(const std::vector<ScatterPoint>& points,
                               const std::string& x_name, const std::string& y_name) {
    if (points.empty()) throw std::invalid_argument("no points to plot");

    double xmin = points[0].x, xmax = points[0].x;
    double ymin = points[0].y, ymax = points[0].y;
    for (const auto& p : points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    std::vector<std::string> labels;
    for (const auto& p : points) labels.push_back(p.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::map<std::string, std::size_t> colour;
    for (std::size_t i = 0; i < labels.size(); ++i) colour[labels[i]] = i % 12;

    const double width = 640.0, height = 480.0;
    const double left = 70.0, right = 20.0, top = 20.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

    const auto& palette = detail::scatter_palette();
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\">\n";
    out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top + plot_h) +
           "\" x2=\"" + detail::svg_num(left + plot_w) + "\" y2=\"" +
           detail::svg_num(top + plot_h) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top) +
           "\" x2=\"" + detail::svg_num(left) + "\" y2=\"" + detail::svg_num(top + plot_h) +
           "\" stroke=\"black\"/>\n";

    out += "<text x=\"" + detail::svg_num(left) + "\" y=\"" + detail::svg_num(height - 32.0) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + detail::axis_num(xmin) + "</text>\n";
    out += "<text x=\"" + detail::svg_num(left + plot_w) + "\" y=\"" +
           detail::svg_num(height - 32.0) + "\" font-size=\"11\" text-anchor=\"middle\">" +
           detail::axis_num(xmax) + "</text>\n";
    out += "<text x=\"" + detail::svg_num(left - 6.0) + "\" y=\"" +
           detail::svg_num(top + plot_h) + "\" font-size=\"11\" text-anchor=\"end\">" +
           detail::axis_num(ymin) + "</text>\n";
    out += "<text x=\"" + detail::svg_num(left - 6.0) + "\" y=\"" + detail::svg_num(top + 8.0) +
           "\" font-size=\"11\" text-anchor=\"end\">" + detail::axis_num(ymax) + "</text>\n";

    out += "<text x=\"" + detail::svg_num(left + plot_w / 2.0) + "\" y=\"" +
           detail::svg_num(height - 12.0) + "\" font-size=\"13\" text-anchor=\"middle\">" +
           detail::xml_escape(x_name) + "</text>\n";
    out += "<text x=\"16\" y=\"" + detail::svg_num(top + plot_h / 2.0) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::svg_num(top + plot_h / 2.0) + ")\">" + detail::xml_escape(y_name) +
           "</text>\n";

    for (const auto& p : points) {
        out += "<circle cx=\"" + detail::svg_num(sx(p.x)) + "\" cy=\"" +
               detail::svg_num(sy(p.y)) + "\" r=\"3\" fill=\"" + palette[colour[p.label]] +
               "\" fill-opacity=\"0.75\"/>\n";
    }

    double ly = top + 14.0;
    const double lx = left + plot_w - 150.0;
    for (const auto& label : labels) {
        out += "<circle cx=\"" + detail::svg_num(lx) + "\" cy=\"" + detail::svg_num(ly - 4.0) +
               "\" r=\"4\" fill=\"" + palette[colour[label]] + "\"/>\n";
        out += "<text x=\"" + detail::svg_num(lx + 10.0) + "\" y=\"" + detail::svg_num(ly) +
               "\" font-size=\"11\">" + detail::xml_escape(label) + "</text>\n";
        ly += 16.0;
    }
    out += "</svg>\n";
    return out;
}

} // namespace bintex
