#pragma once

// ScaleTrimConfig JSON:
//   { "h": int, "m": int, "delta_ee": int, "n_ref": int,
//     "alpha": "<decimal string>", "lut": [c_i at scale 2^-8, ...] }
// Unknown keys are ignored on read.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "trimscale/datapath.hpp"
#include "trimscale/hash.hpp"

namespace trimscale {

inline std::string format_alpha(long double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.18Lf", alpha);
  return buf;
}

inline long double parse_alpha(const std::string& s) {
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::invalid_argument("alpha is not a decimal string: " + s);
  return v;
}

inline nlohmann::ordered_json config_to_json(const ScaleTrimConfig& cfg) {
  nlohmann::ordered_json j;
  j["h"] = cfg.h;
  j["m"] = cfg.m;
  j["delta_ee"] = cfg.delta_ee;
  j["n_ref"] = cfg.n_ref;
  j["alpha"] = format_alpha(cfg.fit.alpha);
  j["lut"] = cfg.comp.entries;
  return j;
}

inline ScaleTrimConfig config_from_json(const nlohmann::json& j) {
  ScaleTrimConfig cfg;
  try {
    cfg.h = j.at("h").get<int>();
    cfg.m = j.at("m").get<int>();
    cfg.delta_ee = j.at("delta_ee").get<int>();
    cfg.n_ref = j.at("n_ref").get<int>();
    cfg.fit.alpha = parse_alpha(j.at("alpha").get<std::string>());
    cfg.comp.entries = j.at("lut").get<std::vector<std::int32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed scaleTRIM config: ") + e.what());
  }
  cfg.fit.h = cfg.h;
  cfg.fit.n_ref = cfg.n_ref;
  cfg.fit.delta_ee = cfg.delta_ee;
  cfg.comp.h = cfg.h;
  cfg.comp.m = cfg.m;
  cfg.validate();
  return cfg;
}

/// Canonical serialization; the input to config_hash.
inline std::string config_dump(const ScaleTrimConfig& cfg) { return config_to_json(cfg).dump(); }

inline std::uint64_t config_hash(const ScaleTrimConfig& cfg) { return fnv1a64(config_dump(cfg)); }

inline ScaleTrimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace trimscale
