#pragma once

#include <array>
#include <cmath>

namespace pxeig {

// Point or vector in R^1 / R^2. One-dimensional data leaves y at 0.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

using Point = Vec2;

// Axis-aligned bounding box. For dim == 1 only the x extent is meaningful.
struct Box {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 0.0};

    static Box interval(double a, double b) { return Box{1, {a, 0.0}, {b, 0.0}}; }
    static Box rectangle(double x0, double x1, double y0, double y1) {
        return Box{2, {x0, y0}, {x1, y1}};
    }

    double extent(int axis) const { return hi[axis] - lo[axis]; }

    bool contains(const Point& p) const {
        const double slack = 1e-12 * (1.0 + std::abs(extent(0)) + (dim == 2 ? std::abs(extent(1)) : 0.0));
        if (p.x < lo[0] - slack || p.x > hi[0] + slack) return false;
        if (dim == 2 && (p.y < lo[1] - slack || p.y > hi[1] + slack)) return false;
        return true;
    }

    friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace pxeig
