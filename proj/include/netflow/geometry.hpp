#pragma once

#include <cmath>
#include <numbers>

namespace netflow {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    Vec2 operator/(double c) const { return {x / c, y / c}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double c) { x *= c; y *= c; return *this; }
};

inline Vec2 operator*(double c, const Vec2& v) { return {c * v.x, c * v.y}; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
// Plain sqrt: coordinates stay O(1), so hypot's over/underflow guard would
// only cost time in the stepping loops.
inline double norm(const Vec2& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

// Counterclockwise quarter turn; the normal convention used throughout is
// nu = J(tau), so a counterclockwise circle has positive signed curvature.
inline Vec2 rot90(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline Vec2 normalized(const Vec2& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

inline double angle_of(const Vec2& v) { return std::atan2(v.y, v.x); }

// Wrap an angle difference into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

// Quintic smoothstep: 1 on (-inf, lo], 0 on [hi, inf), C^2 in between.
inline double smooth_cutoff(double r, double lo, double hi) {
    if (r <= lo) return 1.0;
    if (r >= hi) return 0.0;
    const double u = (r - lo) / (hi - lo);
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

// Tangent of the quadratic through (0,p0), (a,p1), (a+b,p2), evaluated at
// parameter 0.  Exact for collinear points and second order on smooth arcs.
// One shared reciprocal: these run inside the stepping loops.
inline Vec2 one_sided_tangent(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                              double a, double b) {
    const double inv = 1.0 / (a * b * (a + b));
    const double c0 = -(2.0 * a + b) * b * inv;
    const double c1 = (a + b) * (a + b) * inv;
    const double c2 = -a * a * inv;
    return c0 * p0 + c1 * p1 + c2 * p2;
}

// Second derivative of the quadratic through three points at spacings a, b.
// On a near-arclength parametrisation this approximates the curvature vector.
inline Vec2 three_point_second_derivative(const Vec2& p0, const Vec2& p1,
                                          const Vec2& p2, double a, double b) {
    const double inv = 2.0 / (a * b * (a + b));
    return (b * inv) * p0 - ((a + b) * inv) * p1 + (a * inv) * p2;
}

}  // namespace netflow
