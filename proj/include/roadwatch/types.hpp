#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadwatch/geometry.hpp"

namespace roadwatch {

using TrackId = std::uint64_t;
using FrameIndex = std::uint64_t;
using LaneId = std::uint32_t;

// The ten object classes carried by the trajectory data.
enum class Category {
    kCar,
    kTruck,
    kBus,
    kTrailer,
    kVan,
    kPedestrian,
    kMotorcycle,
    kBicycle,
    kEmergencyVehicle,
    kOther,
};

constexpr int kCategoryCount = 10;

// Canonical lower-case name, e.g. "emergency_vehicle".
std::string_view category_name(Category c);

// Case-insensitive parse of a category name. Returns nullopt for unknown names.
std::optional<Category> parse_category(std::string_view name);

// Pedestrians and bicycles are exempt from the maneuver rules, both as rule
// subjects and as lead candidates. Everything else counts as a vehicle.
inline bool is_vehicle(Category c) {
    return c != Category::kPedestrian && c != Category::kBicycle;
}

struct Dimensions {
    double length = 0.0;
    double width = 0.0;
    double height = 0.0;

    bool operator==(const Dimensions&) const = default;
};

// One object observation in one frame, in the map coordinate frame.
struct TrackedObject {
    TrackId track_id = 0;
    Category category = Category::kOther;
    Vec3 position;                 // box center, meters
    Dimensions dimensions;         // meters, all strictly positive
    double yaw = 0.0;              // radians, [-pi, pi)
    std::optional<Vec2> velocity;  // m/s; absent when the source carries none

    // Scalar speed used by the maneuver rules: Euclidean norm of the 2D
    // velocity, 0 when no velocity is known.
    double speed() const { return velocity ? norm(*velocity) : 0.0; }

    bool operator==(const TrackedObject&) const = default;
};

struct Frame {
    FrameIndex frame_index = 0;
    double timestamp = 0.0;  // seconds
    std::string sensor_id;
    std::vector<TrackedObject> objects;

    bool operator==(const Frame&) const = default;
};

}  // namespace roadwatch
