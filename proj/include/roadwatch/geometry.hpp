#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace roadwatch {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    bool operator==(const Vec2& o) const = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec2 xy() const { return {x, y}; }
    bool operator==(const Vec3& o) const = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b points left of a.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

inline double distance(const Vec2& a, const Vec2& b) { return norm(b - a); }

// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * M_PI;
    a = std::fmod(a + M_PI, two_pi);
    if (a < 0.0) a += two_pi;
    return a - M_PI;
}

struct PolylineProjection {
    double s = 0.0;               // arc length from the first vertex to the foot point
    double lateral_offset = 0.0;  // signed distance, positive left of travel direction
    double distance = 0.0;        // |lateral_offset|
};

// Projects a point onto a polyline: per-segment orthogonal projection clamped to
// the segment ends, keeping the closest foot point. Ties between segments keep
// the earlier segment. Requires at least 2 points with consecutive points distinct.
PolylineProjection project_to_polyline(const Vec2& point, std::span<const Vec2> polyline);

// Total arc length of a polyline.
double polyline_length(std::span<const Vec2> polyline);

}  // namespace roadwatch
