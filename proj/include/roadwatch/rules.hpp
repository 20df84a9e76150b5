#pragma once

#include <array>
#include <optional>
#include <vector>

#include "roadwatch/lane_map.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

// Thresholds for the six maneuver rules. The minimum-speed gate is fixed by
// the method at 15 km/h; the remaining thresholds are deployment knobs.
struct RuleConfig {
    double min_speed = 15.0 / 3.6;   // m/s, rule 1 gate
    double distance_threshold = 1.0; // m, rule 4 degenerate-overlap filter
    double ttc_threshold = 1.5;      // s, rule 6
    double lead_horizon = 150.0;     // m, max longitudinal distance searched ahead

    // Throws ConfigError unless all four values are strictly positive.
    void validate() const;
};

// Follower/lead pairing along one lane.
struct LeadRelation {
    TrackId follower_id = 0;
    TrackId lead_id = 0;
    double gap = 0.0;            // bumper-to-bumper, clamped to >= 0
    double follower_speed = 0.0; // m/s
    double lead_speed = 0.0;     // m/s
    double closing_speed = 0.0;  // follower_speed - lead_speed
    double ttc = 0.0;            // gap / closing_speed when closing, else +inf

    static LeadRelation make(TrackId follower, TrackId lead, double gap, double follower_speed,
                             double lead_speed);
};

// Outcome of the six per-vehicle rules for one frame.
//   r1: speed >= min_speed
//   r2: speed > lead speed
//   r3: speed >= speed of every same-lane vehicle ahead within the horizon
//   r4: gap >= distance_threshold
//   r5: gap < ((dv in km/h) / 30)^2, result in meters
//   r6: ttc <= ttc_threshold
// r2..r6 are false whenever no lead exists; accident = all six.
struct RuleEvaluation {
    TrackId track_id = 0;
    std::array<bool, 6> rule_flags{};
    bool accident = false;
    std::optional<LeadRelation> lead;
    std::size_t vehicles_ahead_considered = 0;  // N in the rule-3 comparison

    // Context for downstream temporal classification.
    double speed = 0.0;
    std::optional<LaneAssignment> lane;
    LaneType lane_type = LaneType::kDriving;  // meaningful only when lane is set
};

// Nearest same-lane vehicle ahead of `vehicle` by arc length, within the
// configured horizon (center-to-center). Gap is bumper-to-bumper assuming
// lane-aligned boxes. Pedestrians and bicycles are never lead candidates.
// Returns nullopt when the vehicle is off-lane or nothing is ahead.
std::optional<LeadRelation> find_lead(const TrackedObject& vehicle, const Frame& frame,
                                      const LaneMap& lane_map, const RuleConfig& config);

// Evaluates the six rules for one vehicle of the frame.
RuleEvaluation evaluate_rules(const TrackedObject& vehicle, const Frame& frame,
                              const LaneMap& lane_map, const RuleConfig& config);

// One RuleEvaluation per on-lane vehicle; off-lane objects, pedestrians and
// bicycles are skipped. Equivalent to evaluate_rules applied independently.
std::vector<RuleEvaluation> evaluate_frame(const Frame& frame, const LaneMap& lane_map,
                                           const RuleConfig& config);

}  // namespace roadwatch
