#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fblab {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    Vec2() = default;
    Vec2(double a, double b) : x1(a), x2(b) {}

    Vec2 operator+(const Vec2& o) const { return {x1 + o.x1, x2 + o.x2}; }
    Vec2 operator-(const Vec2& o) const { return {x1 - o.x1, x2 - o.x2}; }
    Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    Vec2& operator+=(const Vec2& o) { x1 += o.x1; x2 += o.x2; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(const Vec2& v) { return std::hypot(v.x1, v.x2); }

/// Axis-aligned rectangle with a uniform node-centered grid, nodes on the
/// boundary included: x1_i = x1_min + i*dx1, i = 0..n1-1.
struct DomainSpec {
    double x1_min = 0.0, x1_max = 1.0;
    double x2_min = 0.0, x2_max = 1.0;
    int n1 = 128, n2 = 128;

    double width() const { return x1_max - x1_min; }
    double height() const { return x2_max - x2_min; }
    double dx1() const { return width() / (n1 - 1); }
    double dx2() const { return height() / (n2 - 1); }
    double x1(int i) const { return x1_min + i * dx1(); }
    double x2(int j) const { return x2_min + j * dx2(); }
    Vec2 node(int i, int j) const { return {x1(i), x2(j)}; }

    /// Signed distance to the rectangle: negative inside, positive outside.
    double signed_distance(const Vec2& p) const {
        double d1 = std::max(x1_min - p.x1, p.x1 - x1_max);
        double d2 = std::max(x2_min - p.x2, p.x2 - x2_max);
        return std::max(d1, d2);
    }
    bool contains(const Vec2& p, double tol = 0.0) const {
        return signed_distance(p) <= tol;
    }
    bool strictly_inside(const Vec2& p, double margin = 0.0) const {
        return signed_distance(p) < -margin;
    }

    void validate() const {
        if (!(width() > 0.0) || !(height() > 0.0))
            throw std::invalid_argument("DomainSpec: rectangle sides must be positive");
        if (n1 < 8 || n2 < 8)
            throw std::invalid_argument("DomainSpec: grid resolution must be at least 8x8");
    }
};

} // namespace fblab
