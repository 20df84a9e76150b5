#include "roadwatch/classifier.hpp"

#include <algorithm>

#include "roadwatch/errors.hpp"

namespace roadwatch {

std::string_view event_type_name(EventType t) {
    switch (t) {
        case EventType::kAccident: return "ACCIDENT";
        case EventType::kStandingActiveLane: return "STANDING_ACTIVE_LANE";
        case EventType::kStandingShoulder: return "STANDING_SHOULDER";
        case EventType::kBreakdown: return "BREAKDOWN";
    }
    return "ACCIDENT";
}

std::optional<EventType> parse_event_type(std::string_view name) {
    if (name == "ACCIDENT") return EventType::kAccident;
    if (name == "STANDING_ACTIVE_LANE") return EventType::kStandingActiveLane;
    if (name == "STANDING_SHOULDER") return EventType::kStandingShoulder;
    if (name == "BREAKDOWN") return EventType::kBreakdown;
    return std::nullopt;
}

void ClassifierConfig::validate() const {
    if (confirm_frames < 1 || release_frames < 1 || stale_frames < 1) {
        throw ConfigError("classifier frame counts must be >= 1");
    }
    if (standing_speed <= 0.0 || standing_duration <= 0.0 || breakdown_duration <= 0.0) {
        throw ConfigError("classifier durations and standing speed must be positive");
    }
}

ScenarioClassifier::ScenarioClassifier(ClassifierConfig config) : config_(config) {
    config_.validate();
}

TrafficEvent ScenarioClassifier::close_accident(TrackId id, const OpenAccident& acc) const {
    TrafficEvent event;
    event.event_type = EventType::kAccident;
    event.track_ids = acc.tracks;
    event.track_ids.insert(id);
    event.start_frame = acc.start_frame;
    event.end_frame = acc.last_positive;
    event.lane_id = acc.lane_id;
    event.confidence = acc.frames_at_last_positive > 0
                           ? static_cast<double>(acc.positives) /
                                 static_cast<double>(acc.frames_at_last_positive)
                           : 1.0;
    event.sensor_ids = acc.sensors;
    return event;
}

TrafficEvent ScenarioClassifier::close_standing(TrackId id, const StandingStreak& streak,
                                                FrameIndex end_frame) const {
    TrafficEvent event;
    event.event_type = *streak.open_as;
    event.track_ids = {id};
    event.start_frame = streak.since_frame;
    event.end_frame = end_frame;
    event.lane_id = streak.lane_id;
    event.confidence = 1.0;  // the standing condition held for the whole span
    event.sensor_ids = streak.sensors;
    return event;
}

std::vector<TrafficEvent> ScenarioClassifier::step(const Frame& frame,
                                                   std::span<const RuleEvaluation> evals) {
    if (have_frame_ && frame.frame_index <= last_frame_) {
        throw OrderingError("classifier: frame_index " + std::to_string(frame.frame_index) +
                            " not after " + std::to_string(last_frame_));
    }
    have_frame_ = true;
    last_frame_ = frame.frame_index;

    std::vector<TrafficEvent> emissions;

    // Index this frame's evaluations; tracks without one count as negative.
    std::map<TrackId, const RuleEvaluation*> by_track;
    for (const RuleEvaluation& eval : evals) {
        by_track[eval.track_id] = &eval;
        tracks_.try_emplace(eval.track_id);
    }

    for (auto it = tracks_.begin(); it != tracks_.end();) {
        const TrackId id = it->first;
        TrackState& st = it->second;
        const auto found = by_track.find(id);
        const RuleEvaluation* eval = found != by_track.end() ? found->second : nullptr;
        if (eval) {
            st.last_seen = frame.frame_index;
        }

        // --- accident path ---
        const bool positive = eval && eval->accident;
        if (st.open_accident) {
            OpenAccident& acc = *st.open_accident;
            acc.frames_since_start += 1;
            if (positive) {
                acc.positives += 1;
                acc.frames_at_last_positive = acc.frames_since_start;
                acc.last_positive = frame.frame_index;
                acc.negative_streak = 0;
                acc.sensors.insert(frame.sensor_id);
                acc.tracks.insert(id);
                if (eval->lead) acc.tracks.insert(eval->lead->lead_id);
            } else {
                acc.negative_streak += 1;
                if (acc.negative_streak >= config_.release_frames) {
                    emissions.push_back(close_accident(id, acc));
                    st.open_accident.reset();
                }
            }
        } else if (positive) {
            if (st.consecutive_accident == 0) {
                st.run_start = frame.frame_index;
                st.run_tracks.clear();
                st.run_sensors.clear();
                st.run_lane = eval->lane ? std::optional<LaneId>(eval->lane->lane_id)
                                         : std::nullopt;
            }
            st.consecutive_accident += 1;
            st.run_tracks.insert(id);
            if (eval->lead) st.run_tracks.insert(eval->lead->lead_id);
            st.run_sensors.insert(frame.sensor_id);
            if (st.consecutive_accident >= config_.confirm_frames) {
                OpenAccident acc;
                acc.start_frame = st.run_start;
                acc.last_positive = frame.frame_index;
                acc.positives = static_cast<std::uint64_t>(st.consecutive_accident);
                acc.frames_since_start = acc.positives;
                acc.frames_at_last_positive = acc.positives;
                acc.tracks = st.run_tracks;
                acc.sensors = st.run_sensors;
                acc.lane_id = st.run_lane;
                st.open_accident = std::move(acc);
                st.consecutive_accident = 0;
            }
        } else {
            st.consecutive_accident = 0;
        }

        // --- standing path ---
        if (eval) {
            const bool standing = eval->lane && eval->speed < config_.standing_speed;
            if (standing) {
                const LaneType lane_type = eval->lane_type;
                if (st.streak && st.streak->lane_type != lane_type) {
                    if (st.streak->open_as) {
                        emissions.push_back(
                            close_standing(id, *st.streak, st.streak->last_condition_frame));
                    }
                    st.streak.reset();
                }
                if (!st.streak) {
                    StandingStreak streak;
                    streak.since_t = frame.timestamp;
                    streak.since_frame = frame.frame_index;
                    streak.lane_type = lane_type;
                    streak.lane_id = eval->lane->lane_id;
                    st.streak = std::move(streak);
                }
                StandingStreak& streak = *st.streak;
                streak.last_condition_frame = frame.frame_index;
                streak.sensors.insert(frame.sensor_id);
                const double held = frame.timestamp - streak.since_t;
                if (!streak.open_as && held >= config_.standing_duration) {
                    streak.open_as = streak.lane_type == LaneType::kShoulder
                                         ? EventType::kStandingShoulder
                                         : EventType::kStandingActiveLane;
                }
                if (streak.open_as == EventType::kStandingShoulder &&
                    held >= config_.breakdown_duration) {
                    streak.open_as = EventType::kBreakdown;
                }
            } else if (st.streak) {
                // Condition observed broken; an unobserved track keeps its streak.
                if (st.streak->open_as) {
                    emissions.push_back(
                        close_standing(id, *st.streak, st.streak->last_condition_frame));
                }
                st.streak.reset();
            }
        }

        // --- staleness ---
        const bool stale =
            frame.frame_index >= st.last_seen &&
            frame.frame_index - st.last_seen >= static_cast<FrameIndex>(config_.stale_frames);
        if (stale) {
            if (st.open_accident) {
                emissions.push_back(close_accident(id, *st.open_accident));
            }
            if (st.streak && st.streak->open_as) {
                emissions.push_back(close_standing(id, *st.streak, st.streak->last_condition_frame));
            }
            it = tracks_.erase(it);
        } else {
            ++it;
        }
    }
    return emissions;
}

std::vector<TrafficEvent> ScenarioClassifier::finalize() {
    std::vector<TrafficEvent> emissions;
    for (auto& [id, st] : tracks_) {
        if (st.open_accident) {
            OpenAccident acc = *st.open_accident;
            // Stream ended: the event closes at the last processed frame and the
            // confidence span extends to it.
            acc.last_positive = last_frame_;
            acc.frames_at_last_positive = acc.frames_since_start;
            emissions.push_back(close_accident(id, acc));
            st.open_accident.reset();
        }
        if (st.streak && st.streak->open_as) {
            emissions.push_back(close_standing(id, *st.streak, last_frame_));
            st.streak.reset();
        }
    }
    tracks_.clear();
    return emissions;
}

}  // namespace roadwatch
