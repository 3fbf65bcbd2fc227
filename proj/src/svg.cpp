#include "rollkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rollkit {

namespace {

// Canvas geometry, pixels.
constexpr double kW = 840, kH = 600;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
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

// Round tick spacing to 1/2/5 times a power of ten.
double tick_step(double span) {
    if (span <= 0.0) return 1.0;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    if (frac < 1.5) return mag;
    if (frac < 3.5) return 2.0 * mag;
    if (frac < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

} // namespace

SvgFigure::SvgFigure(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgFigure::set_ranges(double x_min, double x_max, double y_min, double y_max) {
    x_min_ = x_min;
    x_max_ = x_max;
    y_min_ = y_min;
    y_max_ = y_max;
    ranged_ = true;
}

void SvgFigure::fit_ranges(const std::vector<std::array<double, 2>>& pts) {
    if (pts.empty()) return;
    double xmin = pts[0][0], xmax = xmin, ymin = pts[0][1], ymax = ymin;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    if (ranged_) {
        xmin = std::min(xmin, x_min_);
        xmax = std::max(xmax, x_max_);
        ymin = std::min(ymin, y_min_);
        ymax = std::max(ymax, y_max_);
    }
    const double mx = std::max(1e-12, 0.05 * (xmax - xmin));
    const double my = std::max(1e-12, 0.05 * (ymax - ymin));
    set_ranges(xmin - mx, xmax + mx, ymin - my, ymax + my);
}

void SvgFigure::add_polyline(std::vector<std::array<double, 2>> pts, std::string color,
                             double width) {
    lines_.push_back({std::move(pts), std::move(color), width});
}

void SvgFigure::add_points(std::vector<std::array<double, 2>> pts, std::string color,
                           double radius) {
    dots_.push_back({std::move(pts), std::move(color), radius});
}

double SvgFigure::map_x(double x) const {
    const double span = x_max_ - x_min_ == 0.0 ? 1.0 : x_max_ - x_min_;
    return kLeft + (x - x_min_) / span * (kW - kLeft - kRight);
}

double SvgFigure::map_y(double y) const {
    const double span = y_max_ - y_min_ == 0.0 ? 1.0 : y_max_ - y_min_;
    return kH - kBottom - (y - y_min_) / span * (kH - kTop - kBottom);
}

void SvgFigure::write(std::ostream& os) const {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
       << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
    if (!meta.empty()) {
        os << "<!--";
        for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
        os << " -->\n";
    }
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"24\" font-family=\"sans-serif\" "
          "font-size=\"16\" text-anchor=\"middle\">"
       << xml_escape(title_) << "</text>\n";

    // Frame.
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
       << kW - kLeft - kRight << "\" height=\"" << kH - kTop - kBottom
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks and grid.
    const double sx = tick_step(x_max_ - x_min_);
    for (double v = std::ceil(x_min_ / sx) * sx; v <= x_max_ + 1e-12 * sx; v += sx) {
        const double px = map_x(v);
        os << "<line x1=\"" << num(px) << "\" y1=\"" << kTop << "\" x2=\"" << num(px)
           << "\" y2=\"" << kH - kBottom << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << num(px) << "\" y=\"" << kH - kBottom + 18
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
           << num(v) << "</text>\n";
    }
    const double sy = tick_step(y_max_ - y_min_);
    for (double v = std::ceil(y_min_ / sy) * sy; v <= y_max_ + 1e-12 * sy; v += sy) {
        const double py = map_y(v);
        os << "<line x1=\"" << kLeft << "\" y1=\"" << num(py) << "\" x2=\""
           << kW - kRight << "\" y2=\"" << num(py) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
           << num(v) << "</text>\n";
    }
    os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
       << xml_escape(x_label_) << "</text>\n";
    os << "<text x=\"18\" y=\"" << kH / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 18 "
       << kH / 2 << ")\">" << xml_escape(y_label_) << "</text>\n";

    for (const Line& l : lines_) {
        if (l.pts.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\""
           << l.width << "\" points=\"";
        for (const auto& p : l.pts) os << num(map_x(p[0])) << ',' << num(map_y(p[1])) << ' ';
        os << "\"/>\n";
    }
    for (const Dots& d : dots_) {
        for (const auto& p : d.pts)
            os << "<circle cx=\"" << num(map_x(p[0])) << "\" cy=\"" << num(map_y(p[1]))
               << "\" r=\"" << d.radius << "\" fill=\"" << d.color << "\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace rollkit
