#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roadwatch/classifier.hpp"
#include "roadwatch/geometry.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

// One external-detector hit: an image-space accident detection from one
// roadside camera, optionally localized into the map frame.
struct DetectionObservation {
    std::string sensor_id;
    FrameIndex frame_index = 0;
    struct Box {
        double x = 0.0;
        double y = 0.0;
        double w = 0.0;
        double h = 0.0;
    } box;                              // pixels
    double confidence = 0.0;            // [0, 1]
    std::optional<Vec2> world_point;    // map frame, when the camera is calibrated

    void validate() const;  // throws ValidationError on invariant violations
};

struct FusionConfig {
    double confidence_threshold = 0.8;  // observations below are discarded
    int confirm_frames = 3;             // consecutive frames to confirm, per sensor
    double merge_radius = 20.0;         // m, cross-camera spatial merge
    int merge_window = 50;              // frames, max span gap for merging

    void validate() const;
};

// A per-camera confirmed detection: the detector fired in confirm_frames
// consecutive frames on one sensor.
struct CameraEvent {
    std::string sensor_id;
    FrameIndex start_frame = 0;    // first frame of the qualifying run
    FrameIndex confirm_frame = 0;  // frame at which confirmation fired
    double confidence = 0.0;       // max observation confidence over the run
    std::optional<Vec2> world_point;

    bool operator==(const CameraEvent&) const = default;
};

// Per-sensor consecutive-frame confirmation. Observations below the
// confidence threshold are discarded; a counter increments while qualifying
// observations appear in directly consecutive frames and resets on any frame
// gap. Reaching confirm_frames emits one CameraEvent per run.
class ConfirmationTracker {
public:
    explicit ConfirmationTracker(FusionConfig config = {});

    // Feeds one observation. Per-sensor frame indices must be non-decreasing
    // (OrderingError otherwise). Returns the confirmed event when the counter
    // reaches confirm_frames.
    std::optional<CameraEvent> ingest(const DetectionObservation& obs);

    const FusionConfig& config() const { return config_; }

private:
    struct SensorState {
        bool has_observation = false;
        FrameIndex last_frame = 0;     // last observed frame (any confidence)
        bool run_active = false;
        FrameIndex run_last = 0;       // last qualifying frame of the run
        FrameIndex run_start = 0;
        int counter = 0;
        double best_confidence = 0.0;
        std::optional<Vec2> world_point;
        bool emitted = false;
    };

    FusionConfig config_;
    std::map<std::string, SensorState> sensors_;
};

// Merges confirmed camera events into accident TrafficEvents: two events
// belong together when their frame spans lie within merge_window of each
// other and, when both carry world points, those lie within merge_radius.
// Merging follows the transitive closure of that relation; each connected
// component yields one event with the union of sensors and the maximum
// confidence. Output is sorted by (start, end, first sensor).
std::vector<TrafficEvent> aggregate_cameras(std::span<const CameraEvent> camera_events,
                                            const FusionConfig& config);

// Hybrid-pipeline merge. Rule-path accident events gain verified=true when a
// learned event overlaps them (span gap within merge_window), absorbing the
// matching learned events' sensors and confidence; otherwise verified=false.
// Learned accidents with no rule counterpart are kept with rule_support=false.
// Non-accident events pass through unchanged.
std::vector<TrafficEvent> merge_paths(std::span<const TrafficEvent> rule_events,
                                      std::span<const TrafficEvent> learned_events,
                                      const FusionConfig& config);

// JSONL observation input, one observation per line:
//   {"sensor": "...", "frame": u, "box": [x,y,w,h], "conf": f, "wx": f?, "wy": f?}
// Unknown keys are ignored; violations raise StreamError with the line number.
std::vector<DetectionObservation> read_observation_stream(std::istream& in);
std::vector<DetectionObservation> read_observation_file(const std::string& path);
std::string write_observation_line(const DetectionObservation& obs);

}  // namespace roadwatch
