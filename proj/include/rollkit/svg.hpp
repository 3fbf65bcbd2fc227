#pragma once

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace rollkit {

// Minimal deterministic SVG scatter/line figure: fixed canvas, data-space
// ranges, axis frame with ticks, polylines and markers. No timestamps or
// randomness anywhere, so identical inputs give identical bytes.
class SvgFigure {
public:
    SvgFigure(std::string title, std::string x_label, std::string y_label);

    void set_ranges(double x_min, double x_max, double y_min, double y_max);
    // Expand ranges to cover the data (with a small margin).
    void fit_ranges(const std::vector<std::array<double, 2>>& pts);

    void add_polyline(std::vector<std::array<double, 2>> pts, std::string color,
                      double width = 1.5);
    void add_points(std::vector<std::array<double, 2>> pts, std::string color,
                    double radius = 2.0);

    // Emitted as a leading XML comment (sorted keys).
    std::map<std::string, std::string> meta;

    void write(std::ostream& os) const;

private:
    struct Line {
        std::vector<std::array<double, 2>> pts;
        std::string color;
        double width;
    };
    struct Dots {
        std::vector<std::array<double, 2>> pts;
        std::string color;
        double radius;
    };

    double map_x(double x) const;
    double map_y(double y) const;

    std::string title_, x_label_, y_label_;
    double x_min_ = 0.0, x_max_ = 1.0, y_min_ = 0.0, y_max_ = 1.0;
    bool ranged_ = false;
    std::vector<Line> lines_;
    std::vector<Dots> dots_;
};

} // namespace rollkit
