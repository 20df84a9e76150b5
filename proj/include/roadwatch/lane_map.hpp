#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roadwatch/geometry.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

enum class LaneType { kDriving, kShoulder };

std::string_view lane_type_name(LaneType t);
std::optional<LaneType> parse_lane_type(std::string_view name);

// Polyline lane geometry. Centerline points are map-frame meters; the travel
// direction is the point order, so positive lateral offsets lie to the left.
struct Lane {
    LaneId lane_id = 0;
    LaneType lane_type = LaneType::kDriving;
    std::vector<Vec2> centerline;  // >= 2 pairwise distinct points
    double width = 0.0;            // > 0

    double length() const { return polyline_length(centerline); }
};

// Projection of a position onto one lane.
struct LaneAssignment {
    LaneId lane_id = 0;
    double s = 0.0;               // arc length along the centerline, meters
    double lateral_offset = 0.0;  // signed meters, positive left of travel
    bool on_lane = false;         // |lateral_offset| <= width / 2
};

class LaneMap {
public:
    LaneMap() = default;

    // Validates all lane invariants (ids unique, widths positive, centerlines
    // with >= 2 pairwise-distinct points). Throws ValidationError on violation.
    // Lanes are kept sorted by lane_id.
    explicit LaneMap(std::vector<Lane> lanes);

    const std::vector<Lane>& lanes() const { return lanes_; }
    bool empty() const { return lanes_.empty(); }
    const Lane* find(LaneId id) const;

    static LaneMap from_json(const std::string& text);
    static LaneMap load(const std::string& path);
    std::string to_json() const;
    void save(const std::string& path) const;

private:
    std::vector<Lane> lanes_;  // sorted by lane_id
};

// Assigns a 2D position to the lane whose centerline projection minimizes
// |lateral_offset|, restricted to lanes where the point lies within half the
// lane width of the centerline. Ties go to the lowest lane_id. Returns nullopt
// when the point is on no lane. Throws ValidationError on an empty map.
std::optional<LaneAssignment> assign_lane(const Vec2& position, const LaneMap& lane_map);

}  // namespace roadwatch
