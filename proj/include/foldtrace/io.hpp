#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldtrace/tracer.hpp"
#include "foldtrace/types.hpp"

namespace foldtrace {

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// index,x,y,flag with 17 significant digits, so reading it back is exact.
inline void write_points_csv(std::ostream& os, const SolutionPath& path) {
    os << "index,x,y,flag\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        os << i << ',' << detail::format_double(path.points[i].x) << ',' << detail::format_double(path.points[i].y)
           << ',' << to_string(path.flags[i]) << '\n';
    }
}

inline SolutionPath read_points_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "index,x,y,flag") {
        throw std::runtime_error("points csv: missing header");
    }
    SolutionPath path;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string index, x, y, flag;
        if (!std::getline(fields, index, ',') || !std::getline(fields, x, ',') || !std::getline(fields, y, ',') ||
            !std::getline(fields, flag)) {
            throw std::runtime_error("points csv: malformed row " + std::to_string(row));
        }
        const auto f = parse_flag(flag);
        if (!f || std::stoul(index) != row) {
            throw std::runtime_error("points csv: bad index or flag in row " + std::to_string(row));
        }
        path.push_back({std::stod(x), std::stod(y)}, *f);
        ++row;
    }
    return path;
}

struct SvgStyle {
    double width = 640.0;
    double height = 640.0;
    double margin = 40.0;
    std::string x_label = "x";
    std::string y_label = "y";
};

/// Polyline plot of the path, one polyline per segment between restarts, with a
/// circle on each turning point.
inline void write_svg(std::ostream& os, const SolutionPath& path, const SvgStyle& style = {}) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const Point2& p : path.points) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    if (path.empty()) {
        x_min = y_min = 0.0;
        x_max = y_max = 1.0;
    }
    const double span_x = x_max > x_min ? x_max - x_min : 1.0;
    const double span_y = y_max > y_min ? y_max - y_min : 1.0;
    const double inner_w = style.width - 2.0 * style.margin;
    const double inner_h = style.height - 2.0 * style.margin;
    auto sx = [&](double x) { return style.margin + (x - x_min) / span_x * inner_w; };
    auto sy = [&](double y) { return style.height - style.margin - (y - y_min) / span_y * inner_h; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
       << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << style.width / 2 << "\" y=\"" << style.height - 8 << "\" font-size=\"14\">"
       << style.x_label << "</text>\n";
    os << "<text x=\"8\" y=\"" << style.height / 2 << "\" font-size=\"14\">" << style.y_label << "</text>\n";

    std::size_t begin = 0;
    for (std::size_t i = 1; i <= path.size(); ++i) {
        if (i < path.size() && path.flags[i] != PointFlag::Restart) {
            continue;
        }
        os << "<polyline class=\"segment\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        for (std::size_t k = begin; k < i; ++k) {
            os << (k == begin ? "" : " ") << detail::format_double(sx(path.points[k].x)) << ','
               << detail::format_double(sy(path.points[k].y));
        }
        os << "\"/>\n";
        begin = i;
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path.flags[i] == PointFlag::TurningPoint) {
            os << "<circle class=\"turning-point\" cx=\"" << detail::format_double(sx(path.points[i].x)) << "\" cy=\""
               << detail::format_double(sy(path.points[i].y)) << "\" r=\"4\" fill=\"red\"/>\n";
        }
    }
    os << "</svg>\n";
}

}  // namespace foldtrace
