#include "roadwatch/fusion.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

void DetectionObservation::validate() const {
    if (confidence < 0.0 || confidence > 1.0) {
        throw ValidationError("observation confidence must be in [0, 1]");
    }
    if (box.w <= 0.0 || box.h <= 0.0) {
        throw ValidationError("observation box must have positive width and height");
    }
}

void FusionConfig::validate() const {
    if (confidence_threshold <= 0.0 || confidence_threshold > 1.0) {
        throw ConfigError("fusion confidence_threshold must be in (0, 1]");
    }
    if (confirm_frames < 1) {
        throw ConfigError("fusion confirm_frames must be >= 1");
    }
    if (merge_radius <= 0.0 || merge_window < 0) {
        throw ConfigError("fusion merge_radius must be positive and merge_window >= 0");
    }
}

ConfirmationTracker::ConfirmationTracker(FusionConfig config) : config_(config) {
    config_.validate();
}

std::optional<CameraEvent> ConfirmationTracker::ingest(const DetectionObservation& obs) {
    obs.validate();
    SensorState& st = sensors_[obs.sensor_id];
    if (st.has_observation && obs.frame_index < st.last_frame) {
        throw OrderingError("sensor " + obs.sensor_id + ": frame " +
                            std::to_string(obs.frame_index) + " arrives after frame " +
                            std::to_string(st.last_frame));
    }
    st.has_observation = true;
    st.last_frame = obs.frame_index;

    if (obs.confidence < config_.confidence_threshold) {
        return std::nullopt;  // filtered out entirely
    }

    if (!st.run_active || obs.frame_index > st.run_last + 1) {
        // New run (first qualifying observation, or a frame gap broke the old one).
        st.run_active = true;
        st.run_start = obs.frame_index;
        st.run_last = obs.frame_index;
        st.counter = 1;
        st.best_confidence = obs.confidence;
        st.world_point = obs.world_point;
        st.emitted = false;
    } else if (obs.frame_index == st.run_last + 1) {
        st.run_last = obs.frame_index;
        st.counter += 1;
        st.best_confidence = std::max(st.best_confidence, obs.confidence);
        if (obs.world_point) st.world_point = obs.world_point;
    } else {
        // Second qualifying observation in the same frame: the frame is already
        // counted, just fold in the stronger detection.
        st.best_confidence = std::max(st.best_confidence, obs.confidence);
        if (obs.world_point) st.world_point = obs.world_point;
    }

    if (!st.emitted && st.counter >= config_.confirm_frames) {
        st.emitted = true;
        return CameraEvent{obs.sensor_id, st.run_start, obs.frame_index, st.best_confidence,
                           st.world_point};
    }
    return std::nullopt;
}

namespace {

// Distance in frames between two inclusive spans; 0 when they overlap.
std::uint64_t span_gap(FrameIndex s1, FrameIndex e1, FrameIndex s2, FrameIndex e2) {
    if (s2 > e1) return s2 - e1;
    if (s1 > e2) return s1 - e2;
    return 0;
}

bool camera_events_mergeable(const CameraEvent& a, const CameraEvent& b,
                             const FusionConfig& config) {
    if (span_gap(a.start_frame, a.confirm_frame, b.start_frame, b.confirm_frame) >
        static_cast<std::uint64_t>(config.merge_window)) {
        return false;
    }
    if (a.world_point && b.world_point) {
        return distance(*a.world_point, *b.world_point) <= config.merge_radius;
    }
    return true;  // without both locations, the frame window decides
}

bool events_mergeable(const TrafficEvent& a, const TrafficEvent& b, const FusionConfig& config) {
    return span_gap(a.start_frame, a.end_frame, b.start_frame, b.end_frame) <=
           static_cast<std::uint64_t>(config.merge_window);
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<TrafficEvent> aggregate_cameras(std::span<const CameraEvent> camera_events,
                                            const FusionConfig& config) {
    config.validate();
    UnionFind uf(camera_events.size());
    for (std::size_t i = 0; i < camera_events.size(); ++i) {
        for (std::size_t j = i + 1; j < camera_events.size(); ++j) {
            if (camera_events_mergeable(camera_events[i], camera_events[j], config)) {
                uf.unite(i, j);
            }
        }
    }
    std::map<std::size_t, TrafficEvent> clusters;
    for (std::size_t i = 0; i < camera_events.size(); ++i) {
        const CameraEvent& ce = camera_events[i];
        auto [it, inserted] = clusters.try_emplace(uf.find(i));
        TrafficEvent& event = it->second;
        if (inserted) {
            event.event_type = EventType::kAccident;
            event.start_frame = ce.start_frame;
            event.end_frame = ce.confirm_frame;
            event.confidence = ce.confidence;
        } else {
            event.start_frame = std::min(event.start_frame, ce.start_frame);
            event.end_frame = std::max(event.end_frame, ce.confirm_frame);
            event.confidence = std::max(event.confidence, ce.confidence);
        }
        event.sensor_ids.insert(ce.sensor_id);
    }
    std::vector<TrafficEvent> events;
    events.reserve(clusters.size());
    for (auto& [root, event] : clusters) {
        events.push_back(std::move(event));
    }
    std::sort(events.begin(), events.end(), [](const TrafficEvent& a, const TrafficEvent& b) {
        if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
        if (a.end_frame != b.end_frame) return a.end_frame < b.end_frame;
        return a.sensor_ids < b.sensor_ids;
    });
    return events;
}

std::vector<TrafficEvent> merge_paths(std::span<const TrafficEvent> rule_events,
                                      std::span<const TrafficEvent> learned_events,
                                      const FusionConfig& config) {
    config.validate();
    std::vector<bool> learned_matched(learned_events.size(), false);
    std::vector<TrafficEvent> merged;
    merged.reserve(rule_events.size() + learned_events.size());

    for (const TrafficEvent& rule_event : rule_events) {
        if (rule_event.event_type != EventType::kAccident) {
            merged.push_back(rule_event);  // only accidents take part in verification
            continue;
        }
        TrafficEvent tagged = rule_event;
        tagged.verified = false;
        for (std::size_t j = 0; j < learned_events.size(); ++j) {
            const TrafficEvent& learned = learned_events[j];
            if (learned.event_type != EventType::kAccident) continue;
            if (!events_mergeable(tagged, learned, config)) continue;
            tagged.verified = true;
            tagged.confidence = std::max(tagged.confidence, learned.confidence);
            tagged.sensor_ids.insert(learned.sensor_ids.begin(), learned.sensor_ids.end());
            learned_matched[j] = true;
        }
        merged.push_back(std::move(tagged));
    }
    for (std::size_t j = 0; j < learned_events.size(); ++j) {
        if (learned_events[j].event_type != EventType::kAccident) {
            merged.push_back(learned_events[j]);
            continue;
        }
        if (!learned_matched[j]) {
            TrafficEvent tagged = learned_events[j];
            tagged.rule_support = false;
            merged.push_back(std::move(tagged));
        }
    }
    std::sort(merged.begin(), merged.end(), [](const TrafficEvent& a, const TrafficEvent& b) {
        if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
        if (a.end_frame != b.end_frame) return a.end_frame < b.end_frame;
        if (a.event_type != b.event_type) return a.event_type < b.event_type;
        return a.track_ids < b.track_ids;
    });
    return merged;
}

std::vector<DetectionObservation> read_observation_stream(std::istream& in) {
    std::vector<DetectionObservation> observations;
    std::string text;
    std::uint64_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw StreamError(std::string("observations: ") + e.what(), line);
        }
        DetectionObservation obs;
        try {
            obs.sensor_id = doc.at("sensor").get<std::string>();
            obs.frame_index = doc.at("frame").get<FrameIndex>();
            const auto& box = doc.at("box");
            if (!box.is_array() || box.size() != 4) {
                throw StreamError("observations: box must be [x, y, w, h]", line);
            }
            obs.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                       box[3].get<double>()};
            obs.confidence = doc.at("conf").get<double>();
            if (doc.contains("wx") && doc.contains("wy")) {
                obs.world_point = Vec2{doc["wx"].get<double>(), doc["wy"].get<double>()};
            }
        } catch (const nlohmann::json::exception& e) {
            throw StreamError(std::string("observations: ") + e.what(), line);
        }
        try {
            obs.validate();
        } catch (const ValidationError& e) {
            throw StreamError(e.what(), line);
        }
        observations.push_back(std::move(obs));
    }
    return observations;
}

std::vector<DetectionObservation> read_observation_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open observation file: " + path);
    }
    return read_observation_stream(in);
}

std::string write_observation_line(const DetectionObservation& obs) {
    nlohmann::ordered_json doc;
    doc["sensor"] = obs.sensor_id;
    doc["frame"] = obs.frame_index;
    doc["box"] = {obs.box.x, obs.box.y, obs.box.w, obs.box.h};
    doc["conf"] = obs.confidence;
    if (obs.world_point) {
        doc["wx"] = obs.world_point->x;
        doc["wy"] = obs.world_point->y;
    }
    return doc.dump();
}

}  // namespace roadwatch
