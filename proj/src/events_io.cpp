#include "roadwatch/events_io.hpp"

#include <fstream>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

std::string write_event_line(const TrafficEvent& event) {
    nlohmann::ordered_json doc;
    doc["type"] = event_type_name(event.event_type);
    doc["tracks"] = event.track_ids;  // std::set serializes sorted
    doc["start"] = event.start_frame;
    doc["end"] = event.end_frame;
    if (event.lane_id) {
        doc["lane"] = *event.lane_id;
    }
    doc["confidence"] = event.confidence;
    doc["sensors"] = event.sensor_ids;
    if (event.verified) {
        doc["verified"] = *event.verified;
    }
    if (event.rule_support) {
        doc["rule_support"] = *event.rule_support;
    }
    return doc.dump();
}

void write_event_stream(std::ostream& out, std::span<const TrafficEvent> events) {
    for (const TrafficEvent& event : events) {
        out << write_event_line(event) << '\n';
    }
}

std::vector<TrafficEvent> read_event_stream(std::istream& in) {
    std::vector<TrafficEvent> events;
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
            throw StreamError(std::string("events: ") + e.what(), line);
        }
        TrafficEvent event;
        try {
            const auto type_name = doc.at("type").get<std::string>();
            const auto type = parse_event_type(type_name);
            if (!type) {
                throw StreamError("events: unknown event type \"" + type_name + "\"", line);
            }
            event.event_type = *type;
            for (const auto& id : doc.at("tracks")) {
                event.track_ids.insert(id.get<TrackId>());
            }
            event.start_frame = doc.at("start").get<FrameIndex>();
            event.end_frame = doc.at("end").get<FrameIndex>();
            if (doc.contains("lane")) {
                event.lane_id = doc["lane"].get<LaneId>();
            }
            event.confidence = doc.at("confidence").get<double>();
            if (doc.contains("sensors")) {
                for (const auto& s : doc["sensors"]) {
                    event.sensor_ids.insert(s.get<std::string>());
                }
            }
            if (doc.contains("verified")) {
                event.verified = doc["verified"].get<bool>();
            }
            if (doc.contains("rule_support")) {
                event.rule_support = doc["rule_support"].get<bool>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw StreamError(std::string("events: ") + e.what(), line);
        }
        if (event.end_frame < event.start_frame) {
            throw StreamError("events: end before start", line);
        }
        events.push_back(std::move(event));
    }
    return events;
}

std::vector<TrafficEvent> read_event_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open event file: " + path);
    }
    return read_event_stream(in);
}

}  // namespace roadwatch
