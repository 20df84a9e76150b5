#include "roadwatch/lane_map.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

std::string_view lane_type_name(LaneType t) {
    return t == LaneType::kDriving ? "driving" : "shoulder";
}

std::optional<LaneType> parse_lane_type(std::string_view name) {
    if (name == "driving") return LaneType::kDriving;
    if (name == "shoulder") return LaneType::kShoulder;
    return std::nullopt;
}

namespace {

void validate_lane(const Lane& lane) {
    if (lane.width <= 0.0) {
        throw ValidationError("lane " + std::to_string(lane.lane_id) + ": width must be positive");
    }
    if (lane.centerline.size() < 2) {
        throw ValidationError("lane " + std::to_string(lane.lane_id) +
                              ": centerline needs at least 2 points");
    }
    for (std::size_t i = 0; i < lane.centerline.size(); ++i) {
        for (std::size_t j = i + 1; j < lane.centerline.size(); ++j) {
            if (lane.centerline[i] == lane.centerline[j]) {
                throw ValidationError("lane " + std::to_string(lane.lane_id) +
                                      ": centerline points must be pairwise distinct");
            }
        }
    }
}

}  // namespace

LaneMap::LaneMap(std::vector<Lane> lanes) : lanes_(std::move(lanes)) {
    std::set<LaneId> ids;
    for (const Lane& lane : lanes_) {
        validate_lane(lane);
        if (!ids.insert(lane.lane_id).second) {
            throw ValidationError("duplicate lane_id " + std::to_string(lane.lane_id));
        }
    }
    std::sort(lanes_.begin(), lanes_.end(),
              [](const Lane& a, const Lane& b) { return a.lane_id < b.lane_id; });
}

const Lane* LaneMap::find(LaneId id) const {
    auto it = std::lower_bound(lanes_.begin(), lanes_.end(), id,
                               [](const Lane& lane, LaneId key) { return lane.lane_id < key; });
    if (it == lanes_.end() || it->lane_id != id) return nullptr;
    return &*it;
}

LaneMap LaneMap::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("lane map: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("lanes") || !doc["lanes"].is_array()) {
        throw FormatError("lane map: expected top-level object with a \"lanes\" array");
    }
    std::vector<Lane> lanes;
    for (const auto& entry : doc["lanes"]) {
        Lane lane;
        try {
            lane.lane_id = entry.at("id").get<LaneId>();
            const auto type_name = entry.at("type").get<std::string>();
            const auto type = parse_lane_type(type_name);
            if (!type) {
                throw FormatError("lane map: unknown lane type \"" + type_name + "\"");
            }
            lane.lane_type = *type;
            lane.width = entry.at("width").get<double>();
            for (const auto& pt : entry.at("centerline")) {
                if (!pt.is_array() || pt.size() != 2) {
                    throw FormatError("lane map: centerline points must be [x, y] pairs");
                }
                lane.centerline.push_back({pt[0].get<double>(), pt[1].get<double>()});
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("lane map: ") + e.what());
        }
        lanes.push_back(std::move(lane));
    }
    return LaneMap(std::move(lanes));
}

LaneMap LaneMap::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open lane map file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string LaneMap::to_json() const {
    nlohmann::ordered_json doc;
    doc["lanes"] = nlohmann::ordered_json::array();
    for (const Lane& lane : lanes_) {
        nlohmann::ordered_json entry;
        entry["id"] = lane.lane_id;
        entry["type"] = lane_type_name(lane.lane_type);
        entry["width"] = lane.width;
        auto& pts = entry["centerline"] = nlohmann::ordered_json::array();
        for (const Vec2& p : lane.centerline) {
            pts.push_back({p.x, p.y});
        }
        doc["lanes"].push_back(std::move(entry));
    }
    return doc.dump();
}

void LaneMap::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write lane map file: " + path);
    }
    out << to_json() << '\n';
}

std::optional<LaneAssignment> assign_lane(const Vec2& position, const LaneMap& lane_map) {
    if (lane_map.empty()) {
        throw ValidationError("assign_lane: empty lane map");
    }
    std::optional<LaneAssignment> best;
    // Lanes are sorted by id, so keeping a strictly better candidate makes the
    // lowest lane_id win ties.
    for (const Lane& lane : lane_map.lanes()) {
        const PolylineProjection proj = project_to_polyline(position, lane.centerline);
        if (proj.distance > lane.width / 2.0) {
            continue;
        }
        if (!best || proj.distance < std::abs(best->lateral_offset)) {
            best = LaneAssignment{lane.lane_id, proj.s, proj.lateral_offset, true};
        }
    }
    return best;
}

}  // namespace roadwatch
