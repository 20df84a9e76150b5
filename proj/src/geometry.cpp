#include "roadwatch/geometry.hpp"

#include <algorithm>

#include "roadwatch/errors.hpp"

namespace roadwatch {

PolylineProjection project_to_polyline(const Vec2& point, std::span<const Vec2> polyline) {
    if (polyline.size() < 2) {
        throw ValidationError("polyline needs at least 2 points");
    }

    PolylineProjection best;
    double best_dist2 = std::numeric_limits<double>::infinity();
    double cum_s = 0.0;

    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec2 a = polyline[i];
        const Vec2 b = polyline[i + 1];
        const Vec2 d = b - a;
        const double len2 = dot(d, d);
        if (len2 <= 0.0) {
            throw ValidationError("polyline has coincident consecutive points");
        }
        const double seg_len = std::sqrt(len2);
        const double t = std::clamp(dot(point - a, d) / len2, 0.0, 1.0);
        const Vec2 foot = a + d * t;
        const Vec2 r = point - foot;
        const double dist2 = dot(r, r);
        if (dist2 < best_dist2) {
            best_dist2 = dist2;
            best.s = cum_s + t * seg_len;
            best.distance = std::sqrt(dist2);
            // Full distance to the (clamped) foot point, signed by which side
            // of the travel direction the point lies on.
            best.lateral_offset = cross(d, r) < 0.0 ? -best.distance : best.distance;
        }
        cum_s += seg_len;
    }
    return best;
}

double polyline_length(std::span<const Vec2> polyline) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        total += distance(polyline[i], polyline[i + 1]);
    }
    return total;
}

}  // namespace roadwatch
