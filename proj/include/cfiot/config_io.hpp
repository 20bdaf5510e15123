/**
 * @file config_io.hpp
 * @brief JSON (de)serialization of the radio configuration.
 */
#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cfiot/netgen.hpp"

namespace cfiot {

nlohmann::json radio_config_to_json(const RadioConfig& cfg);

/// Applies the keys present in j on top of base; unknown keys are an error.
RadioConfig radio_config_from_json(const nlohmann::json& j, RadioConfig base = RadioConfig{});

RadioConfig load_radio_config(const std::string& path, RadioConfig base = RadioConfig{});
void save_radio_config(const RadioConfig& cfg, const std::string& path);

}  // namespace cfiot
