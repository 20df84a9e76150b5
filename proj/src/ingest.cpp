#include "roadwatch/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Frames without an explicit timestamp fall back to frame_index at the
// dataset's nominal 10 Hz capture rate.
constexpr double kFallbackPeriod = 0.1;

// Interned ids for non-numeric object keys start well clear of any plausible
// numeric annotation id.
constexpr TrackId kInternedIdBase = TrackId{1} << 32;

std::optional<std::uint64_t> parse_uint(std::string_view text) {
    std::uint64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        return std::nullopt;
    }
    return value;
}

double yaw_from_quaternion(double qx, double qy, double qz, double qw) {
    return std::atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz));
}

// Accepts a cuboid as a bare value array, an object with a "val" array, or a
// list of such objects (first entry wins).
const json* find_cuboid_values(const json& cuboid) {
    if (cuboid.is_array()) {
        if (!cuboid.empty() && cuboid[0].is_number()) {
            return &cuboid;
        }
        if (!cuboid.empty() && cuboid[0].is_object() && cuboid[0].contains("val")) {
            return &cuboid[0]["val"];
        }
        return nullptr;
    }
    if (cuboid.is_object() && cuboid.contains("val")) {
        return &cuboid["val"];
    }
    return nullptr;
}

std::uint64_t count_bbox_entries(const json& object_data) {
    if (!object_data.contains("bbox")) return 0;
    const json& bbox = object_data["bbox"];
    if (bbox.is_array() && !bbox.empty() && bbox[0].is_object()) {
        return bbox.size();
    }
    return 1;
}

Category category_from_object(const json& frame_object, const json* root_object) {
    const json* source = nullptr;
    if (frame_object.contains("object_data") && frame_object["object_data"].contains("type")) {
        source = &frame_object["object_data"]["type"];
    } else if (frame_object.contains("type")) {
        source = &frame_object["type"];
    } else if (root_object && root_object->contains("type")) {
        source = &(*root_object)["type"];
    }
    if (source && source->is_string()) {
        if (auto cat = parse_category(source->get<std::string>())) {
            return *cat;
        }
    }
    return Category::kOther;  // foreign files: unknown classes degrade to "other"
}

}  // namespace

OpenLabelData parse_openlabel(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("openlabel: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("openlabel")) {
        throw FormatError("openlabel: missing top-level \"openlabel\" key");
    }
    const json& root = doc["openlabel"];
    const json* root_objects =
        root.contains("objects") && root["objects"].is_object() ? &root["objects"] : nullptr;

    OpenLabelData result;
    if (!root.contains("frames")) {
        return result;
    }
    const json& frames = root["frames"];
    if (!frames.is_object()) {
        throw FormatError("openlabel: \"frames\" must be an object keyed by frame index");
    }

    std::unordered_map<std::string, TrackId> interned;
    auto track_id_for = [&](const std::string& key) -> TrackId {
        if (auto numeric = parse_uint(key)) {
            return *numeric;
        }
        auto [it, inserted] = interned.try_emplace(key, kInternedIdBase + interned.size());
        return it->second;
    };

    for (const auto& [frame_key, frame_value] : frames.items()) {
        const auto index = parse_uint(frame_key);
        if (!index) {
            throw FormatError("openlabel: non-numeric frame key \"" + frame_key + "\"");
        }
        Frame frame;
        frame.frame_index = *index;
        frame.sensor_id = "openlabel";
        frame.timestamp = static_cast<double>(*index) * kFallbackPeriod;
        if (frame_value.contains("frame_properties")) {
            const json& props = frame_value["frame_properties"];
            if (props.contains("timestamp") && props["timestamp"].is_number()) {
                frame.timestamp = props["timestamp"].get<double>();
            }
        }
        if (frame_value.contains("objects")) {
            const json& objects = frame_value["objects"];
            if (!objects.is_object()) {
                throw FormatError("openlabel: frame " + frame_key + ": \"objects\" must be an object");
            }
            for (const auto& [obj_key, obj_value] : objects.items()) {
                const TrackId track_id = track_id_for(obj_key);
                const json* root_object = nullptr;
                if (root_objects && root_objects->contains(obj_key)) {
                    root_object = &(*root_objects)[obj_key];
                }
                const Category category = category_from_object(obj_value, root_object);

                result.counts.tracks.insert(track_id);
                result.counts.per_class[static_cast<std::size_t>(category)] += 1;

                const json* object_data =
                    obj_value.contains("object_data") ? &obj_value["object_data"] : nullptr;
                if (object_data) {
                    result.counts.box2d_count += count_bbox_entries(*object_data);
                }

                const json* cuboid_values = nullptr;
                if (object_data && object_data->contains("cuboid")) {
                    cuboid_values = find_cuboid_values((*object_data)["cuboid"]);
                }
                if (!cuboid_values) {
                    continue;  // 2D-only object: counted, not tracked
                }
                const json& vals = *cuboid_values;
                if (!vals.is_array() || (vals.size() != 9 && vals.size() != 10)) {
                    throw FormatError("openlabel: frame " + frame_key + " object \"" + obj_key +
                                      "\": cuboid must have 9 or 10 numeric values");
                }
                TrackedObject obj;
                obj.track_id = track_id;
                obj.category = category;
                obj.position = {vals[0].get<double>(), vals[1].get<double>(), vals[2].get<double>()};
                if (vals.size() == 10) {
                    obj.yaw = yaw_from_quaternion(vals[3].get<double>(), vals[4].get<double>(),
                                                  vals[5].get<double>(), vals[6].get<double>());
                    obj.dimensions = {vals[7].get<double>(), vals[8].get<double>(),
                                      vals[9].get<double>()};
                } else {
                    obj.yaw = vals[5].get<double>();
                    obj.dimensions = {vals[6].get<double>(), vals[7].get<double>(),
                                      vals[8].get<double>()};
                }
                obj.yaw = wrap_angle(obj.yaw);
                if (obj.dimensions.length <= 0.0 || obj.dimensions.width <= 0.0 ||
                    obj.dimensions.height <= 0.0) {
                    throw FormatError("openlabel: frame " + frame_key + " object \"" + obj_key +
                                      "\": dimensions must be strictly positive");
                }
                result.counts.box3d_count += 1;
                frame.objects.push_back(std::move(obj));
            }
        }
        result.frames.push_back(std::move(frame));
    }

    std::sort(result.frames.begin(), result.frames.end(),
              [](const Frame& a, const Frame& b) { return a.frame_index < b.frame_index; });
    for (std::size_t i = 0; i + 1 < result.frames.size(); ++i) {
        if (result.frames[i].frame_index == result.frames[i + 1].frame_index) {
            throw FormatError("openlabel: duplicate frame index " +
                              std::to_string(result.frames[i].frame_index));
        }
    }
    return result;
}

OpenLabelData parse_openlabel(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_openlabel(buf.str());
}

OpenLabelData load_openlabel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open OpenLABEL file: " + path);
    }
    return parse_openlabel(in);
}

DatasetStats compute_stats(std::span<const Frame> frames, const RawAnnotationCounts* raw) {
    DatasetStats stats;
    stats.frame_count = frames.size();
    if (raw) {
        stats.box2d_count = raw->box2d_count;
        stats.box3d_count = raw->box3d_count;
        stats.track_count = raw->tracks.size();
        for (std::size_t i = 0; i < raw->per_class.size(); ++i) {
            if (raw->per_class[i] > 0) {
                stats.per_class[static_cast<Category>(i)] = raw->per_class[i];
            }
        }
        return stats;
    }
    std::unordered_set<TrackId> tracks;
    for (const Frame& frame : frames) {
        for (const TrackedObject& obj : frame.objects) {
            stats.box3d_count += 1;
            stats.per_class[obj.category] += 1;
            tracks.insert(obj.track_id);
        }
    }
    stats.track_count = tracks.size();
    return stats;
}

std::string DatasetStats::to_json() const {
    ordered_json doc;
    doc["frame_count"] = frame_count;
    doc["box2d_count"] = box2d_count;
    doc["box3d_count"] = box3d_count;
    doc["track_count"] = track_count;
    auto& per = doc["per_class"] = ordered_json::object();
    for (const auto& [cat, count] : per_class) {
        per[std::string(category_name(cat))] = count;
    }
    return doc.dump(2);
}

std::string DatasetStats::to_table() const {
    std::ostringstream out;
    auto row = [&out](std::string_view label, std::uint64_t value) {
        out << "  " << std::left << std::setw(22) << label << std::right << std::setw(12) << value
            << '\n';
    };
    out << "dataset statistics\n";
    row("frames", frame_count);
    row("2D boxes", box2d_count);
    row("3D boxes", box3d_count);
    row("tracks", track_count);
    for (const auto& [cat, count] : per_class) {
        row(category_name(cat), count);
    }
    return out.str();
}

void validate_frame_objects(const Frame& frame, std::uint64_t line) {
    std::unordered_set<TrackId> seen;
    for (const TrackedObject& obj : frame.objects) {
        if (!seen.insert(obj.track_id).second) {
            throw StreamError("duplicate track_id " + std::to_string(obj.track_id) +
                                  " in frame " + std::to_string(frame.frame_index),
                              line);
        }
        if (obj.dimensions.length <= 0.0 || obj.dimensions.width <= 0.0 ||
            obj.dimensions.height <= 0.0) {
            throw StreamError("track " + std::to_string(obj.track_id) +
                                  ": dimensions must be strictly positive",
                              line);
        }
    }
}

std::optional<Frame> TrajectoryReader::next() {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_number_;
        // Tolerate blank lines between frames.
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw StreamError(std::string("trajectory: ") + e.what(), line_number_);
        }
        Frame frame;
        try {
            frame.frame_index = doc.at("frame").get<FrameIndex>();
            frame.timestamp = doc.at("t").get<double>();
            frame.sensor_id = doc.at("sensor").get<std::string>();
            for (const json& entry : doc.at("objects")) {
                TrackedObject obj;
                obj.track_id = entry.at("id").get<TrackId>();
                const auto cat_name = entry.at("cat").get<std::string>();
                const auto cat = parse_category(cat_name);
                if (!cat) {
                    throw StreamError("unknown category \"" + cat_name + "\"", line_number_);
                }
                obj.category = *cat;
                obj.position = {entry.at("x").get<double>(), entry.at("y").get<double>(),
                                entry.at("z").get<double>()};
                obj.dimensions = {entry.at("l").get<double>(), entry.at("w").get<double>(),
                                  entry.at("h").get<double>()};
                obj.yaw = wrap_angle(entry.at("yaw").get<double>());
                if (entry.contains("vx") && entry.contains("vy")) {
                    obj.velocity = Vec2{entry["vx"].get<double>(), entry["vy"].get<double>()};
                }
                frame.objects.push_back(std::move(obj));
            }
        } catch (const json::exception& e) {
            throw StreamError(std::string("trajectory: ") + e.what(), line_number_);
        }

        validate_frame_objects(frame, line_number_);
        if (have_prev_) {
            if (frame.frame_index <= prev_index_) {
                throw StreamError("frame_index " + std::to_string(frame.frame_index) +
                                      " does not increase (previous " +
                                      std::to_string(prev_index_) + ")",
                                  line_number_);
            }
            const double dt = frame.timestamp - prev_timestamp_;
            if (dt < 0.0) {
                throw StreamError("timestamp decreases", line_number_);
            }
            if (nominal_period_ > 0.0 && dt > 10.0 * nominal_period_) {
                throw StreamError("timestamp delta " + std::to_string(dt) +
                                      " s exceeds 10x the nominal period of " +
                                      std::to_string(nominal_period_) + " s",
                                  line_number_);
            }
            if (nominal_period_ == 0.0 && dt > 0.0) {
                nominal_period_ = dt;
            }
        }
        have_prev_ = true;
        prev_index_ = frame.frame_index;
        prev_timestamp_ = frame.timestamp;
        return frame;
    }
    return std::nullopt;
}

std::vector<Frame> read_trajectory_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open trajectory file: " + path);
    }
    TrajectoryReader reader(in);
    std::vector<Frame> frames;
    while (auto frame = reader.next()) {
        frames.push_back(std::move(*frame));
    }
    return frames;
}

std::string write_trajectory_line(const Frame& frame) {
    ordered_json doc;
    doc["frame"] = frame.frame_index;
    doc["t"] = frame.timestamp;
    doc["sensor"] = frame.sensor_id;
    auto& objects = doc["objects"] = ordered_json::array();
    for (const TrackedObject& obj : frame.objects) {
        ordered_json entry;
        entry["id"] = obj.track_id;
        entry["cat"] = category_name(obj.category);
        entry["x"] = obj.position.x;
        entry["y"] = obj.position.y;
        entry["z"] = obj.position.z;
        entry["l"] = obj.dimensions.length;
        entry["w"] = obj.dimensions.width;
        entry["h"] = obj.dimensions.height;
        entry["yaw"] = obj.yaw;
        if (obj.velocity) {
            entry["vx"] = obj.velocity->x;
            entry["vy"] = obj.velocity->y;
        }
        objects.push_back(std::move(entry));
    }
    return doc.dump();
}

void write_trajectory_stream(std::ostream& out, std::span<const Frame> frames) {
    for (const Frame& frame : frames) {
        out << write_trajectory_line(frame) << '\n';
    }
}

}  // namespace roadwatch
