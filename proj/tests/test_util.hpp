#pragma once

#include <random>
#include <vector>

#include "roadwatch/lane_map.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch::testutil {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Straight 3-lane fixture: two driving lanes (y = 0 and 3.5) plus a shoulder
// (y = 7), all width 3.5, running along +x.
inline LaneMap straight_map(double x_min = -200.0, double x_max = 2000.0) {
    std::vector<Lane> lanes;
    lanes.push_back({1, LaneType::kDriving, {{x_min, 0.0}, {x_max, 0.0}}, 3.5});
    lanes.push_back({2, LaneType::kDriving, {{x_min, 3.5}, {x_max, 3.5}}, 3.5});
    lanes.push_back({3, LaneType::kShoulder, {{x_min, 7.0}, {x_max, 7.0}}, 3.5});
    return LaneMap(std::move(lanes));
}

// A 3-lane map with bends, for projection tests that need multiple segments.
inline LaneMap bent_map() {
    std::vector<Lane> lanes;
    lanes.push_back(
        {1, LaneType::kDriving, {{0.0, 0.0}, {30.0, 0.0}, {60.0, 5.0}, {90.0, 15.0}}, 3.5});
    lanes.push_back(
        {2, LaneType::kDriving, {{0.0, 3.5}, {30.0, 3.5}, {60.0, 8.5}, {90.0, 18.5}}, 3.5});
    lanes.push_back(
        {3, LaneType::kShoulder, {{0.0, 7.0}, {30.0, 7.0}, {60.0, 12.0}, {90.0, 22.0}}, 3.5});
    return LaneMap(std::move(lanes));
}

inline TrackedObject make_vehicle(TrackId id, double x, double y, Vec2 velocity,
                                  Category category = Category::kCar, double length = 4.5) {
    TrackedObject obj;
    obj.track_id = id;
    obj.category = category;
    obj.position = {x, y, 0.8};
    obj.dimensions = {length, 1.9, 1.6};
    obj.yaw = 0.0;
    obj.velocity = velocity;
    return obj;
}

}  // namespace roadwatch::testutil
