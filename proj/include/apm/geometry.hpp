#pragma once

#include <Eigen/Dense>

namespace apm {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

using Mat2 = Eigen::Matrix2d;

// Image point together with the differential at the source.
struct MapJet {
    Point p;
    Mat2 jac;
};

// Axis-aligned box |x - cx| <= hx, |y - cy| <= hy.
struct Box {
    double cx = 0.0;
    double cy = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    bool contains(Point p) const noexcept {
        return p.x >= cx - hx && p.x <= cx + hx && p.y >= cy - hy && p.y <= cy + hy;
    }
};

}  // namespace apm
