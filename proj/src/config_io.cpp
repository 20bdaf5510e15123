/**
 * @file config_io.cpp
 */
#include "cfiot/config_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace cfiot {

nlohmann::json radio_config_to_json(const RadioConfig& cfg) {
  nlohmann::json j;
  j["carrier_freq"] = cfg.carrier_freq;
  j["bandwidth"] = cfg.bandwidth;
  j["pilot_len"] = cfg.pilot_len;
  j["coherence_len"] = cfg.coherence_len;
  j["P_u"] = cfg.P_u;
  j["P_p"] = cfg.P_p;
  j["P_d"] = cfg.P_d;
  j["noise_figure"] = cfg.noise_figure;
  j["sigma_sh"] = cfg.sigma_sh;
  j["shadow_mode"] = cfg.shadow_mode == ShadowMode::iid ? "iid" : "correlated";
  j["shadow_decorr_dist"] = cfg.shadow_decorr_dist;
  j["shadow_split"] = cfg.shadow_split;
  j["ap_height"] = cfg.ap_height;
  j["thing_height"] = cfg.thing_height;
  j["d0"] = cfg.d0;
  j["d1"] = cfg.d1;
  j["pilot_mode"] = cfg.pilot_mode == PilotMode::random_unit ? "random" : "orthogonal";
  return j;
}

RadioConfig radio_config_from_json(const nlohmann::json& j, RadioConfig base) {
  static const std::set<std::string> known = {
      "carrier_freq", "bandwidth",  "pilot_len",    "coherence_len",      "P_u",
      "P_p",          "P_d",        "noise_figure", "sigma_sh",           "shadow_mode",
      "shadow_decorr_dist",         "shadow_split", "ap_height",          "thing_height",
      "d0",           "d1",         "pilot_mode"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known.find(key) == known.end()) {
      throw std::invalid_argument("radio config: unknown key '" + key + "'");
    }
  }
  if (j.contains("carrier_freq")) base.carrier_freq = j["carrier_freq"].get<double>();
  if (j.contains("bandwidth")) base.bandwidth = j["bandwidth"].get<double>();
  if (j.contains("pilot_len")) base.pilot_len = j["pilot_len"].get<std::size_t>();
  if (j.contains("coherence_len")) base.coherence_len = j["coherence_len"].get<std::size_t>();
  if (j.contains("P_u")) base.P_u = j["P_u"].get<double>();
  if (j.contains("P_p")) base.P_p = j["P_p"].get<double>();
  if (j.contains("P_d")) base.P_d = j["P_d"].get<double>();
  if (j.contains("noise_figure")) base.noise_figure = j["noise_figure"].get<double>();
  if (j.contains("sigma_sh")) base.sigma_sh = j["sigma_sh"].get<double>();
  if (j.contains("shadow_mode")) {
    const std::string mode = j["shadow_mode"].get<std::string>();
    if (mode == "iid") {
      base.shadow_mode = ShadowMode::iid;
    } else if (mode == "correlated") {
      base.shadow_mode = ShadowMode::correlated;
    } else {
      throw std::invalid_argument("radio config: shadow_mode must be iid or correlated");
    }
  }
  if (j.contains("shadow_decorr_dist")) base.shadow_decorr_dist = j["shadow_decorr_dist"].get<double>();
  if (j.contains("shadow_split")) base.shadow_split = j["shadow_split"].get<double>();
  if (j.contains("ap_height")) base.ap_height = j["ap_height"].get<double>();
  if (j.contains("thing_height")) base.thing_height = j["thing_height"].get<double>();
  if (j.contains("d0")) base.d0 = j["d0"].get<double>();
  if (j.contains("d1")) base.d1 = j["d1"].get<double>();
  if (j.contains("pilot_mode")) {
    const std::string mode = j["pilot_mode"].get<std::string>();
    if (mode == "random") {
      base.pilot_mode = PilotMode::random_unit;
    } else if (mode == "orthogonal") {
      base.pilot_mode = PilotMode::orthogonal;
    } else {
      throw std::invalid_argument("radio config: pilot_mode must be random or orthogonal");
    }
  }
  base.validate();
  return base;
}

RadioConfig load_radio_config(const std::string& path, RadioConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_radio_config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return radio_config_from_json(j, base);
}

void save_radio_config(const RadioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_radio_config: cannot open " + path);
  out << radio_config_to_json(cfg).dump(2) << "\n";
}

}  // namespace cfiot
