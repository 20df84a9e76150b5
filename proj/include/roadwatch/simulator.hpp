#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "roadwatch/classifier.hpp"
#include "roadwatch/lane_map.hpp"
#include "roadwatch/rules.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

enum class ScenarioType { kFreeFlow, kRearEnd, kShoulderStop, kStandingQueue };

std::string_view scenario_type_name(ScenarioType t);
std::optional<ScenarioType> parse_scenario_type(std::string_view name);

struct RearEndParams {
    double follower_speed = 30.0;      // m/s, held constant
    double lead_initial_speed = 25.0;  // m/s
    double lead_deceleration = 4.0;    // m/s^2, braking to standstill from t=0
    double initial_gap = 200.0;        // m, bumper-to-bumper at t=0
};

struct ShoulderStopParams {
    double approach_speed = 20.0;  // m/s
    double cruise_time = 2.0;      // s in the driving lane before the maneuver
    double shift_duration = 3.0;   // s to cross onto the shoulder
    double deceleration = 2.5;     // m/s^2, braking from maneuver start
};

struct QueueParams {
    int queue_size = 4;
    double queue_gap = 2.0;  // m, bumper-to-bumper within the queue
};

// A deterministic synthetic scenario on a straight 3-lane map (two driving
// lanes plus a shoulder). The same scenario value always generates the same
// stream, byte for byte.
struct Scenario {
    ScenarioType type = ScenarioType::kFreeFlow;
    std::uint64_t seed = 0;
    double frame_rate = 25.0;  // Hz
    double duration = 40.0;    // s
    int vehicle_count = 6;     // free-flow / background vehicles
    double noise_sigma = 0.0;  // m, Gaussian position jitter (after ground truth)
    RearEndParams rear_end;
    ShoulderStopParams shoulder;
    QueueParams queue;

    void validate() const;
    std::string to_json() const;

    // Scenario with seed-randomized kinematics inside envelopes that keep the
    // analytic ground truth well-defined (e.g. the rear-end rule window always
    // spans at least the confirmation length).
    static Scenario randomized(ScenarioType type, std::uint64_t seed);
};

// One expected emission of the detection pipeline, with the analytically
// derived trigger (event start) frame.
struct ExpectedEvent {
    EventType type = EventType::kAccident;
    std::set<TrackId> track_ids;
    FrameIndex trigger_frame = 0;
    FrameIndex last_frame = 0;
    std::optional<LaneId> lane_id;

    bool operator==(const ExpectedEvent&) const = default;
};

struct GroundTruth {
    std::vector<ExpectedEvent> events;
    std::string notice;  // set when the parameters yield no event
    // Six analytic rule flags per frame for designated tracks (the rear-end
    // follower), indexed from frame 0.
    std::map<TrackId, std::vector<std::array<bool, 6>>> rule_flags;

    std::string to_json() const;
    // Expected events in TrafficEvent form, e.g. for writing a truth file.
    std::vector<TrafficEvent> as_events(const std::string& sensor_id = "sim") const;
};

// Frame-at-a-time scenario synthesis; frames can be produced in any order and
// the result depends only on (scenario, frame index).
class ScenarioEngine {
public:
    explicit ScenarioEngine(const Scenario& scenario);

    FrameIndex frame_count() const { return frame_count_; }
    Frame frame_at(FrameIndex k) const;
    const LaneMap& lane_map() const { return lane_map_; }

    // Analytic ground truth under the given thresholds.
    GroundTruth ground_truth(const RuleConfig& rules = {},
                             const ClassifierConfig& classifier = {}) const;

private:
    struct Profile {
        TrackId id = 0;
        Category category = Category::kCar;
        Dimensions dims{4.5, 1.9, 1.6};
        double x0 = 0.0;
        double v0 = 0.0;
        double brake_time = -1.0;  // < 0: never brakes
        double decel = 0.0;
        double y0 = 0.0;
        double y1 = 0.0;
        double lat_start = 0.0;
        double lat_duration = 0.0;

        void state_at(double t, Vec2& pos, Vec2& vel) const;
    };

    double time_at(FrameIndex k) const { return static_cast<double>(k) / scenario_.frame_rate; }

    Scenario scenario_;
    FrameIndex frame_count_ = 0;
    std::vector<Profile> vehicles_;
    LaneMap lane_map_;
};

struct SimulationResult {
    std::vector<Frame> frames;
    GroundTruth truth;
    LaneMap lane_map;
};

// Generates the full frame sequence plus ground truth and the fixture map.
SimulationResult generate(const Scenario& scenario, const RuleConfig& rules = {},
                          const ClassifierConfig& classifier = {});

}  // namespace roadwatch
