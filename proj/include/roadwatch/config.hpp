#pragma once

#include <string>

#include "roadwatch/classifier.hpp"
#include "roadwatch/fusion.hpp"
#include "roadwatch/rules.hpp"

namespace roadwatch {

// Full resolved configuration of the detection pipeline. Every threshold has
// a default; a config file only overrides what it names.
struct AppConfig {
    RuleConfig rules;
    ClassifierConfig classifier;
    FusionConfig fusion;

    void validate() const;
    // Fully resolved snapshot, suitable for run manifests and `config show`.
    std::string to_json() const;
};

// Parses a JSON config with optional "rules", "classifier" and "fusion"
// sections. Unknown sections or keys raise ConfigError (typo protection).
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::string& path);

}  // namespace roadwatch
