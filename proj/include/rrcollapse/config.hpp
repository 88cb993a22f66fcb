#pragma once

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrcollapse/errors.hpp"
#include "rrcollapse/experiments.hpp"

namespace rrc {

/// Top-level config keys: experiment, parameters, seed, sample_interval.
/// Unknown keys are rejected; experiment names and parameter names are
/// validated against the registry.
inline ExperimentConfig parse_config_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "experiment" && key != "parameters" && key != "seed" &&
            key != "sample_interval")
            throw ConfigError("unknown config key '" + key + "'");
    if (!doc.contains("experiment") || !doc["experiment"].is_string())
        throw ConfigError("config requires a string 'experiment' key");

    ExperimentConfig config;
    config.name = doc["experiment"].get<std::string>();
    if (doc.contains("parameters")) {
        if (!doc["parameters"].is_object())
            throw ConfigError("'parameters' must be an object of name/number pairs");
        for (const auto& [key, value] : doc["parameters"].items()) {
            if (!value.is_number())
                throw ConfigError("parameter '" + key + "' must be a number");
            config.parameters[key] = value.get<double>();
        }
    }
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("sample_interval"))
        config.sample_interval = doc["sample_interval"].get<int>();
    return resolve_config(config);
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config_json(doc);
}

/// Apply `key=value` overrides. Keys `seed` and `sample_interval` hit the
/// top-level fields; everything else must name a known parameter.
inline ExperimentConfig apply_overrides(ExperimentConfig config,
                                        const std::vector<std::string>& overrides) {
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override must look like key=value: '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        char* end = nullptr;
        const double parsed = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0')
            throw ConfigError("override value for '" + key + "' is not a number");
        if (key == "seed")
            config.seed = static_cast<std::uint64_t>(parsed);
        else if (key == "sample_interval")
            config.sample_interval = static_cast<int>(parsed);
        else
            config.parameters[key] = parsed;
    }
    return resolve_config(config);
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json doc;
    doc["experiment"] = config.name;
    doc["parameters"] = nlohmann::json::object();
    for (const auto& [key, value] : config.parameters) doc["parameters"][key] = value;
    doc["seed"] = config.seed;
    doc["sample_interval"] = config.sample_interval;
    return doc;
}

}  // namespace rrc
