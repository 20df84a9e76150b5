#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "roadwatch/rules.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

enum class EventType { kAccident, kStandingActiveLane, kStandingShoulder, kBreakdown };

std::string_view event_type_name(EventType t);
std::optional<EventType> parse_event_type(std::string_view name);

// A confirmed traffic event over a span of frames.
struct TrafficEvent {
    EventType event_type = EventType::kAccident;
    std::set<TrackId> track_ids;
    FrameIndex start_frame = 0;
    FrameIndex end_frame = 0;
    std::optional<LaneId> lane_id;
    double confidence = 1.0;
    std::set<std::string> sensor_ids;

    // Hybrid-pipeline tags, set only by merge_paths.
    std::optional<bool> verified;      // rule-path accident confirmed by a camera event
    std::optional<bool> rule_support;  // camera-path accident seen by the rule path

    bool operator==(const TrafficEvent&) const = default;
};

// Temporal thresholds of the event taxonomy. Durations are wall-clock seconds
// measured on frame timestamps; frame counts are stream frames.
struct ClassifierConfig {
    int confirm_frames = 3;            // consecutive accident-positive frames to open
    int release_frames = 25;           // accident-negative frames to close
    double standing_speed = 1.0;       // m/s, below which a vehicle is standing
    double standing_duration = 5.0;    // s of continuous standing to open
    double breakdown_duration = 120.0; // s of shoulder standing to upgrade
    int stale_frames = 50;             // unseen frames before a track is dropped

    void validate() const;
};

// Streaming per-track event classification over an ordered frame sequence.
//
// Accident events open once the rule-path accident flag holds for
// confirm_frames consecutive frames (event start is the first frame of the
// run) and close after release_frames without the flag; the event ends at the
// last positive frame and its confidence is the fraction of positive frames
// in that span. Standing events open after standing_duration of continuous
// sub-threshold speed on a lane (start is the first standing frame) and close
// as soon as the condition breaks; shoulder standing upgrades to a breakdown
// event after breakdown_duration. A track unobserved in a frame keeps its
// standing streak alive (occlusion tolerance) until stale_frames pass, at
// which point its state is dropped and open events close at the last frame
// the condition was seen to hold.
//
// The classifier is a value: copying it checkpoints the stream state, and a
// copy resumed on the remaining frames emits exactly the events of unsplit
// processing.
class ScenarioClassifier {
public:
    explicit ScenarioClassifier(ClassifierConfig config = {});

    // Processes one frame (strictly increasing frame_index; OrderingError
    // otherwise) and returns the events closed by it.
    std::vector<TrafficEvent> step(const Frame& frame, std::span<const RuleEvaluation> evals);

    // Closes all open events at the last processed frame and returns them.
    std::vector<TrafficEvent> finalize();

    const ClassifierConfig& config() const { return config_; }

private:
    struct OpenAccident {
        FrameIndex start_frame = 0;
        FrameIndex last_positive = 0;
        std::uint64_t positives = 0;
        std::uint64_t frames_since_start = 0;
        std::uint64_t frames_at_last_positive = 0;
        int negative_streak = 0;
        std::set<TrackId> tracks;
        std::set<std::string> sensors;
        std::optional<LaneId> lane_id;
    };

    struct StandingStreak {
        double since_t = 0.0;
        FrameIndex since_frame = 0;
        FrameIndex last_condition_frame = 0;
        LaneType lane_type = LaneType::kDriving;
        LaneId lane_id = 0;
        std::set<std::string> sensors;
        std::optional<EventType> open_as;  // set once the event has opened
    };

    struct TrackState {
        int consecutive_accident = 0;
        FrameIndex run_start = 0;
        std::set<TrackId> run_tracks;
        std::set<std::string> run_sensors;
        std::optional<LaneId> run_lane;
        std::optional<OpenAccident> open_accident;
        std::optional<StandingStreak> streak;
        FrameIndex last_seen = 0;
    };

    TrafficEvent close_accident(TrackId id, const OpenAccident& acc) const;
    TrafficEvent close_standing(TrackId id, const StandingStreak& streak,
                                FrameIndex end_frame) const;

    ClassifierConfig config_;
    std::map<TrackId, TrackState> tracks_;
    bool have_frame_ = false;
    FrameIndex last_frame_ = 0;
};

}  // namespace roadwatch
