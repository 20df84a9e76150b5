#include "roadwatch/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

namespace {

using nlohmann::json;

using FieldMap = std::map<std::string, std::function<void(const json&)>>;

void apply_section(const json& section, const std::string& name, const FieldMap& fields) {
    if (!section.is_object()) {
        throw ConfigError("config section \"" + name + "\" must be an object");
    }
    for (const auto& [key, value] : section.items()) {
        auto it = fields.find(key);
        if (it == fields.end()) {
            throw ConfigError("config: unknown key \"" + name + "." + key + "\"");
        }
        try {
            it->second(value);
        } catch (const json::exception& e) {
            throw ConfigError("config: bad value for \"" + name + "." + key + "\": " + e.what());
        }
    }
}

}  // namespace

void AppConfig::validate() const {
    rules.validate();
    classifier.validate();
    fusion.validate();
}

std::string AppConfig::to_json() const {
    nlohmann::ordered_json doc;
    doc["rules"] = {{"min_speed", rules.min_speed},
                    {"distance_threshold", rules.distance_threshold},
                    {"ttc_threshold", rules.ttc_threshold},
                    {"lead_horizon", rules.lead_horizon}};
    doc["classifier"] = {{"confirm_frames", classifier.confirm_frames},
                         {"release_frames", classifier.release_frames},
                         {"standing_speed", classifier.standing_speed},
                         {"standing_duration", classifier.standing_duration},
                         {"breakdown_duration", classifier.breakdown_duration},
                         {"stale_frames", classifier.stale_frames}};
    doc["fusion"] = {{"confidence_threshold", fusion.confidence_threshold},
                     {"confirm_frames", fusion.confirm_frames},
                     {"merge_radius", fusion.merge_radius},
                     {"merge_window", fusion.merge_window}};
    return doc.dump(2);
}

AppConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    AppConfig config;
    const FieldMap rule_fields = {
        {"min_speed", [&](const json& v) { config.rules.min_speed = v.get<double>(); }},
        {"distance_threshold",
         [&](const json& v) { config.rules.distance_threshold = v.get<double>(); }},
        {"ttc_threshold", [&](const json& v) { config.rules.ttc_threshold = v.get<double>(); }},
        {"lead_horizon", [&](const json& v) { config.rules.lead_horizon = v.get<double>(); }},
    };
    const FieldMap classifier_fields = {
        {"confirm_frames", [&](const json& v) { config.classifier.confirm_frames = v.get<int>(); }},
        {"release_frames", [&](const json& v) { config.classifier.release_frames = v.get<int>(); }},
        {"standing_speed",
         [&](const json& v) { config.classifier.standing_speed = v.get<double>(); }},
        {"standing_duration",
         [&](const json& v) { config.classifier.standing_duration = v.get<double>(); }},
        {"breakdown_duration",
         [&](const json& v) { config.classifier.breakdown_duration = v.get<double>(); }},
        {"stale_frames", [&](const json& v) { config.classifier.stale_frames = v.get<int>(); }},
    };
    const FieldMap fusion_fields = {
        {"confidence_threshold",
         [&](const json& v) { config.fusion.confidence_threshold = v.get<double>(); }},
        {"confirm_frames", [&](const json& v) { config.fusion.confirm_frames = v.get<int>(); }},
        {"merge_radius", [&](const json& v) { config.fusion.merge_radius = v.get<double>(); }},
        {"merge_window", [&](const json& v) { config.fusion.merge_window = v.get<int>(); }},
    };
    for (const auto& [section, value] : doc.items()) {
        if (section == "rules") {
            apply_section(value, section, rule_fields);
        } else if (section == "classifier") {
            apply_section(value, section, classifier_fields);
        } else if (section == "fusion") {
            apply_section(value, section, fusion_fields);
        } else {
            throw ConfigError("config: unknown section \"" + section + "\"");
        }
    }
    config.validate();
    return config;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace roadwatch
