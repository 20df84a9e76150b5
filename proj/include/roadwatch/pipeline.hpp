#pragma once

#include <vector>

#include "roadwatch/classifier.hpp"
#include "roadwatch/config.hpp"
#include "roadwatch/lane_map.hpp"
#include "roadwatch/velocity.hpp"

namespace roadwatch {

// The per-frame detection pipeline: velocity resolution, rule evaluation and
// temporal classification, with bounded per-track state. One pipeline handles
// one ordered stream; independent streams get independent pipelines.
class DetectPipeline {
public:
    DetectPipeline(LaneMap lane_map, AppConfig config);

    // Processes one frame (mutated in place by velocity resolution) and
    // returns the events it closed.
    std::vector<TrafficEvent> step(Frame& frame);

    // Flushes open events at end of stream.
    std::vector<TrafficEvent> finalize();

    const LaneMap& lane_map() const { return lane_map_; }
    const AppConfig& config() const { return config_; }

private:
    LaneMap lane_map_;
    AppConfig config_;
    VelocityResolver velocities_;
    ScenarioClassifier classifier_;
    int frames_since_evict_ = 0;
};

}  // namespace roadwatch
