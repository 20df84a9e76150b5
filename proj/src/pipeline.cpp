#include "roadwatch/pipeline.hpp"

#include "roadwatch/rules.hpp"

namespace roadwatch {

DetectPipeline::DetectPipeline(LaneMap lane_map, AppConfig config)
    : lane_map_(std::move(lane_map)), config_(std::move(config)), classifier_(config_.classifier) {
    config_.validate();
}

std::vector<TrafficEvent> DetectPipeline::step(Frame& frame) {
    velocities_.resolve(frame);
    const std::vector<RuleEvaluation> evals = evaluate_frame(frame, lane_map_, config_.rules);
    auto events = classifier_.step(frame, evals);

    // The classifier drops stale tracks itself; mirror that cadence for the
    // velocity histories so per-track state stays bounded.
    if (++frames_since_evict_ >= config_.classifier.stale_frames) {
        frames_since_evict_ = 0;
        if (frame.frame_index >= static_cast<FrameIndex>(config_.classifier.stale_frames)) {
            velocities_.evict_stale(frame.frame_index -
                                    static_cast<FrameIndex>(config_.classifier.stale_frames));
        }
    }
    return events;
}

std::vector<TrafficEvent> DetectPipeline::finalize() { return classifier_.finalize(); }

}  // namespace roadwatch
